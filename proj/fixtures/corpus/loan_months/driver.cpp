#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int total_interest(int principal, int rate_pct, int years);

static void t_two_years() { RT_CHECK_EQ(total_interest(12000, 6, 2), 1440); }

int main(int argc, char** argv) {
  return rt::run({{"t_two_years", t_two_years}}, argc, argv);
}
