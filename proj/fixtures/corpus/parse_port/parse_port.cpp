#include <stdexcept>
#include <string>
#include <vector>

#include "rt.hpp"

int parse_port(const std::string& addr) {
  auto colon = addr.find(':');
  if (colon == std::string::npos) {
    RT_THROW(std::invalid_argument, "no port in " + addr);
  }
  std::string digits = addr.substr(colon);
  int port = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') {
      RT_THROW(std::invalid_argument, std::string("bad digit ") + c);
    }
    port = port * 10 + (c - '0');
  }
  return port;
}
