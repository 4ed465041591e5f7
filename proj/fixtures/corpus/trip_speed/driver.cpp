#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

std::string trip_summary(int meters, int seconds);

static void t_short_trip() { RT_CHECK_EQ(trip_summary(30000, 1800), std::string("steady 60")); }
static void t_hour() { RT_CHECK_EQ(trip_summary(50000, 3600), std::string("steady 50")); }

int main(int argc, char** argv) {
  return rt::run({{"t_short_trip", t_short_trip}, {"t_hour", t_hour}}, argc, argv);
}
