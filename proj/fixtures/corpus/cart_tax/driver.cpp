#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int checkout(const std::vector<int>& prices, int rate_pct);

static void t_cart() { RT_CHECK_EQ(checkout({1000, 1000}, 10), 2200); }

int main(int argc, char** argv) {
  return rt::run({{"t_cart", t_cart}}, argc, argv);
}
