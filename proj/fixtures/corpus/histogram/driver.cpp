#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

std::vector<int> histogram(const std::vector<int>& values, int lo, int hi, int buckets);

static void t_edge() { RT_CHECK_EQ(histogram({0, 5, 9}, 0, 9, 3), std::vector<int>({1, 1, 1})); }

int main(int argc, char** argv) {
  return rt::run({{"t_edge", t_edge}}, argc, argv);
}
