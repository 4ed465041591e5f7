#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int share(int total, int people, int guests);

static void t_one_payer() { RT_CHECK_EQ(share(90, 2, 1), 90); }
static void t_even() { RT_CHECK_EQ(share(90, 3, 0), 30); }

int main(int argc, char** argv) {
  return rt::run({{"t_one_payer", t_one_payer}, {"t_even", t_even}}, argc, argv);
}
