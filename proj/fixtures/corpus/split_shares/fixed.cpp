#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int share(int total, int people, int guests) {
  int payers = people - guests;
  if (payers <= 0) {
    RT_THROW(std::domain_error, "nobody pays for " + std::to_string(total));
  }
  int each = total / payers;
  return each;
}
