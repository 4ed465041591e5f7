#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> cells;
};

int cell(const Matrix& m, int r, int c) {
  int idx = r * m.cols + c;
  if (idx >= static_cast<int>(m.cells.size())) {
    RT_THROW(std::out_of_range, "cell " + std::to_string(idx));
  }
  return m.cells[idx];
}
