#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int median(const std::vector<int>& sorted);

static void t_odd() { RT_CHECK_EQ(median({1, 3, 5, 7, 9}), 5); }
static void t_empty() { RT_CHECK_EQ(median({}), 0); }

int main(int argc, char** argv) {
  return rt::run({{"t_odd", t_odd}, {"t_empty", t_empty}}, argc, argv);
}
