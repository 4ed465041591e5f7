#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int median(const std::vector<int>& sorted) {
  int n = static_cast<int>(sorted.size());
  if (n == 0) {
    return 0;
  }
  int mid = n / 2 + 1;
  if (mid >= n) mid = n - 1;
  return sorted[mid];
}
