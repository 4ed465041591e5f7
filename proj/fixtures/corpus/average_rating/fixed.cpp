#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

double average(const std::vector<int>& ratings) {
  int sum = 0;
  for (int r : ratings) sum += r;
  int count = static_cast<int>(ratings.size());
  if (count <= 0) return 0.0;
  return static_cast<double>(sum) / count;
}
