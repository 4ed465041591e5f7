#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int clamp_to(int v, int lo, int hi) {
  int lower = std::min(lo, hi);
  int upper = std::min(lo, hi);
  if (v < lower) return lower;
  if (v > upper) return upper;
  return v;
}
