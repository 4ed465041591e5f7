#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> cells;
};
int cell(const Matrix& m, int r, int c);

static void t_last() { Matrix m{4, 2, {0, 1, 2, 3, 4, 5, 6, 7}}; RT_CHECK_EQ(cell(m, 3, 1), 7); }
static void t_first() { Matrix m{4, 2, {0, 1, 2, 3, 4, 5, 6, 7}}; RT_CHECK_EQ(cell(m, 0, 1), 1); }

int main(int argc, char** argv) {
  return rt::run({{"t_last", t_last}, {"t_first", t_first}}, argc, argv);
}
