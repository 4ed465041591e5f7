#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

struct Ring {
  std::vector<int> slots;
  int head = 0;
};
int advance(Ring& r, int steps);

static void t_wrap() { Ring r{{10, 20, 30}, 2}; RT_CHECK_EQ(advance(r, 2), 20); }
static void t_plain() { Ring r{{10, 20, 30}, 0}; RT_CHECK_EQ(advance(r, 1), 20); }

int main(int argc, char** argv) {
  return rt::run({{"t_wrap", t_wrap}, {"t_plain", t_plain}}, argc, argv);
}
