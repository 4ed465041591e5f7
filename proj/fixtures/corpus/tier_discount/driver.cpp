#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int discounted(int price, int tier);

static void t_tier1() { RT_CHECK_EQ(discounted(200, 1), 190); }
static void t_none() { RT_CHECK_EQ(discounted(200, 0), 200); }

int main(int argc, char** argv) {
  return rt::run({{"t_tier1", t_tier1}, {"t_none", t_none}}, argc, argv);
}
