#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int checked_div(int num, int den) {
  if (den == 0) {
    RT_THROW(std::domain_error, "division by zero");
  }
  return num / den;
}

int hit_ratio(int hits, int misses) {
  int lookups = hits - misses;
  int pct = checked_div(hits * 100, lookups);
  return pct;
}
