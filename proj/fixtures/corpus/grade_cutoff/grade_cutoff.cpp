#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

char grade(int score) {
  int a_cutoff = 80;
  int b_cutoff = 70;
  if (score >= a_cutoff) return 'A';
  if (score >= b_cutoff) return 'B';
  return 'C';
}
