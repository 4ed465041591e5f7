#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

char grade(int score);

static void t_b_range() { RT_CHECK_EQ(grade(85), 'B'); }
static void t_c_range() { RT_CHECK_EQ(grade(50), 'C'); }

int main(int argc, char** argv) {
  return rt::run({{"t_b_range", t_b_range}, {"t_c_range", t_c_range}}, argc, argv);
}
