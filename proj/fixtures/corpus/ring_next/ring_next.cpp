#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

struct Ring {
  std::vector<int> slots;
  int head = 0;
};

int advance(Ring& r, int steps) {
  int cap = static_cast<int>(r.slots.size());
  int next = r.head + steps;
  if (next >= cap) {
    RT_THROW(std::out_of_range, "slot " + std::to_string(next) + " of " + std::to_string(cap));
  }
  r.head = next;
  return r.slots[next];
}
