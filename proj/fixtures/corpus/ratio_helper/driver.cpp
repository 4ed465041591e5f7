#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int hit_ratio(int hits, int misses);

static void t_even() { RT_CHECK_EQ(hit_ratio(5, 5), 50); }

int main(int argc, char** argv) {
  return rt::run({{"t_even", t_even}}, argc, argv);
}
