#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int tax_cents(int subtotal_cents, int rate_pct);

int checkout(const std::vector<int>& prices, int rate_pct) {
  int subtotal = 0;
  for (int p : prices) subtotal += p;
  int tax = tax_cents(subtotal, rate_pct);
  return subtotal + tax;
}
