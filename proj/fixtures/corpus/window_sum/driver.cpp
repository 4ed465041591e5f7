#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int sum_window(const std::vector<int>& v, int start, int k);

static void t_tail() { RT_CHECK_EQ(sum_window({1, 2, 3, 4}, 2, 2), 7); }
static void t_head() { RT_CHECK_EQ(sum_window({1, 2, 3, 4}, 0, 2), 3); }

int main(int argc, char** argv) {
  return rt::run({{"t_tail", t_tail}, {"t_head", t_head}}, argc, argv);
}
