#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int to_fahrenheit(int celsius);

static void t_boil() { RT_CHECK_EQ(to_fahrenheit(100), 212); }

int main(int argc, char** argv) {
  return rt::run({{"t_boil", t_boil}}, argc, argv);
}
