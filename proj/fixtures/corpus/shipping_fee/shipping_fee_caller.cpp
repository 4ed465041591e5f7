#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int shipping_fee(int grams);

int order_total(int item_cents, int grams) {
  int fee = shipping_fee(grams);
  int total = item_cents + fee * 100;
  return total;
}
