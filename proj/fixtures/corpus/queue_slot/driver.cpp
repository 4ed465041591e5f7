#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

std::vector<int> assign(int first, int count, int lanes);

static void t_wrap() { RT_CHECK_EQ(assign(2, 3, 3), std::vector<int>({2, 0, 1})); }

int main(int argc, char** argv) {
  return rt::run({{"t_wrap", t_wrap}}, argc, argv);
}
