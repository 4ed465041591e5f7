#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

double average(const std::vector<int>& ratings);

static void t_avg() { RT_CHECK_EQ(average({4, 5, 3, 4}), 4.0); }
static void t_empty() { RT_CHECK_EQ(average({}), 0.0); }

int main(int argc, char** argv) {
  return rt::run({{"t_avg", t_avg}, {"t_empty", t_empty}}, argc, argv);
}
