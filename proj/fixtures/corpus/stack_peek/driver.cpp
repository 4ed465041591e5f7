#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int peek(const std::vector<int>& items);

static void t_peek() { RT_CHECK_EQ(peek({4, 5, 6}), 6); }

int main(int argc, char** argv) {
  return rt::run({{"t_peek", t_peek}}, argc, argv);
}
