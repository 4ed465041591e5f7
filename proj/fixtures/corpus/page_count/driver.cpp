#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int pages(int items, int per_page);

static void t_ragged() { RT_CHECK_EQ(pages(25, 10), 3); }
static void t_exact() { RT_CHECK_EQ(pages(20, 10), 2); }

int main(int argc, char** argv) {
  return rt::run({{"t_ragged", t_ragged}, {"t_exact", t_exact}}, argc, argv);
}
