#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int tax_cents(int subtotal_cents, int rate_pct) {
  int tax = subtotal_cents * rate_pct / 1000;
  return tax;
}
