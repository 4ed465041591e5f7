#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int slot_for(int ticket, int lanes);

std::vector<int> assign(int first, int count, int lanes) {
  std::vector<int> out;
  for (int t = first; t < first + count; ++t) {
    int lane = slot_for(t, lanes);
    out.push_back(lane);
  }
  return out;
}
