#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int discounted(int price, int tier) {
  if (tier <= 0) {
    return price;
  }
  int pct = tier * 50;
  int off = price * pct / 100;
  return price - off;
}
