#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int shipping_fee(int grams) {
  int tier = grams / 1000;
  int fee = 5 + tier * 7;
  if (grams > 5000) {
    fee = 40;
  }
  return fee;
}
