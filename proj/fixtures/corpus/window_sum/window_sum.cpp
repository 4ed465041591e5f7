#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int sum_window(const std::vector<int>& v, int start, int k) {
  int total = 0;
  int end = start + k;
  for (int i = start; i <= end; ++i) {
    if (i >= static_cast<int>(v.size())) {
      RT_THROW(std::out_of_range, "index " + std::to_string(i) + " past " + std::to_string(v.size()));
    }
    total += v[i];
  }
  return total;
}
