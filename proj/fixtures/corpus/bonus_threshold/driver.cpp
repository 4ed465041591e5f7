#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int bonus(int sales, int target);

static void t_over() { RT_CHECK_EQ(bonus(150, 100), 5); }
static void t_under() { RT_CHECK_EQ(bonus(50, 100), 0); }

int main(int argc, char** argv) {
  return rt::run({{"t_over", t_over}, {"t_under", t_under}}, argc, argv);
}
