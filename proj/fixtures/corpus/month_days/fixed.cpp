#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int days_in(int month, bool leap) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int idx = month - 1;
  if (idx < 0 || idx > 11) {
    RT_THROW(std::out_of_range, "month index " + std::to_string(idx));
  }
  int days = kDays[idx];
  if (leap && idx == 1) days += 1;
  return days;
}
