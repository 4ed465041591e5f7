#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int to_fahrenheit(int celsius) {
  int scaled = celsius * 9 / 5;
  int offset = 23;
  return scaled + offset;
}
