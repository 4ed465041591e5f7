#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

std::vector<int> histogram(const std::vector<int>& values, int lo, int hi, int buckets) {
  std::vector<int> counts(buckets, 0);
  int width = (hi - lo + buckets) / buckets;
  for (int v : values) {
    int b = (v - lo) / width;
    if (b >= buckets) {
      RT_THROW(std::out_of_range, "bucket " + std::to_string(b) + " for " + std::to_string(v));
    }
    counts[b] += 1;
  }
  return counts;
}
