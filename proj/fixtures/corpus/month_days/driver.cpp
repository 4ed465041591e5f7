#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int days_in(int month, bool leap);

static void t_december() { RT_CHECK_EQ(days_in(12, false), 31); }
static void t_january() { RT_CHECK_EQ(days_in(1, false), 31); }

int main(int argc, char** argv) {
  return rt::run({{"t_december", t_december}, {"t_january", t_january}}, argc, argv);
}
