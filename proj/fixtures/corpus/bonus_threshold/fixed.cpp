#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int bonus(int sales, int target) {
  int threshold = target;
  if (sales < threshold) {
    return 0;
  }
  return (sales - threshold) / 10;
}
