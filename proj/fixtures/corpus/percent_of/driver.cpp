#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int percent(int part, int whole);

static void t_quarter() { RT_CHECK_EQ(percent(1, 4), 25); }
static void t_zero() { RT_CHECK_EQ(percent(3, 0), 0); }

int main(int argc, char** argv) {
  return rt::run({{"t_quarter", t_quarter}, {"t_zero", t_zero}}, argc, argv);
}
