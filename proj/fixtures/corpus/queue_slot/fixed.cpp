#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int slot_for(int ticket, int lanes) {
  int lane = ticket % lanes;
  if (lane >= lanes) {
    RT_THROW(std::out_of_range, "lane " + std::to_string(lane) + " of " + std::to_string(lanes));
  }
  return lane;
}
