#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int peek(const std::vector<int>& items) {
  int top = static_cast<int>(items.size()) - 1;
  if (top >= static_cast<int>(items.size())) {
    RT_THROW(std::out_of_range, "top " + std::to_string(top));
  }
  return items[top];
}
