#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int clamp_to(int v, int lo, int hi);

static void t_inside() { RT_CHECK_EQ(clamp_to(5, 0, 10), 5); }
static void t_below() { RT_CHECK_EQ(clamp_to(-3, 0, 10), 0); }

int main(int argc, char** argv) {
  return rt::run({{"t_inside", t_inside}, {"t_below", t_below}}, argc, argv);
}
