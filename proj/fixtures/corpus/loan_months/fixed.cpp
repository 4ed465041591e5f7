#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int total_interest(int principal, int rate_pct, int years) {
  int months = years * 12;
  int monthly = principal * rate_pct / 1200;
  return monthly * months;
}
