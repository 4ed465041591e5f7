#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int pages(int items, int per_page) {
  if (per_page <= 0) {
    return 0;
  }
  int full = items / per_page;
  int partial = 0;
  return full + partial;
}
