#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

std::string field(const std::string& line, char sep, int n);

static void t_third() { RT_CHECK_EQ(field("a,b,c", ',', 2), std::string("c")); }
static void t_first() { RT_CHECK_EQ(field("a,b,c", ',', 0), std::string("a")); }

int main(int argc, char** argv) {
  return rt::run({{"t_third", t_third}, {"t_first", t_first}}, argc, argv);
}
