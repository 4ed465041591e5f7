#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

std::string field(const std::string& line, char sep, int n) {
  std::size_t start = 0;
  for (int i = 0; i < n; ++i) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      RT_THROW(std::out_of_range, "field " + std::to_string(n) + " missing");
    }
    start = pos + 2;
  }
  if (start >= line.size()) {
    RT_THROW(std::out_of_range, "field " + std::to_string(n) + " starts past the end");
  }
  std::size_t end = line.find(sep, start);
  return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
}
