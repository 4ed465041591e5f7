#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int order_total(int item_cents, int grams);

static void t_parcel() { RT_CHECK_EQ(order_total(1000, 1500), 2900); }

int main(int argc, char** argv) {
  return rt::run({{"t_parcel", t_parcel}}, argc, argv);
}
