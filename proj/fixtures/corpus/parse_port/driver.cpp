#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int parse_port(const std::string& addr);

static void t_port() { RT_CHECK_EQ(parse_port("db:5432"), 5432); }
static void t_short() { RT_CHECK_EQ(parse_port("h:7"), 7); }

int main(int argc, char** argv) {
  return rt::run({{"t_port", t_port}, {"t_short", t_short}}, argc, argv);
}
