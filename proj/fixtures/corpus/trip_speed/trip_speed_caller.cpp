#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int speed_kmh(int meters, int seconds);

std::string trip_summary(int meters, int seconds) {
  int kmh = speed_kmh(meters, seconds);
  std::string label = kmh > 100 ? "fast" : "steady";
  return label + " " + std::to_string(kmh);
}
