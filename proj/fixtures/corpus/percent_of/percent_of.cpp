#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int percent(int part, int whole) {
  if (whole == 0) {
    return 0;
  }
  int scaled = part * 10;
  return scaled / whole;
}
