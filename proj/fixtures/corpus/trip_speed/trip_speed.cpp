#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int speed_kmh(int meters, int seconds) {
  int hours_x100 = seconds / 3600;
  if (hours_x100 == 0) {
    RT_THROW(std::domain_error, "zero duration for " + std::to_string(meters) + " m");
  }
  return meters / 10 / hours_x100;
}
