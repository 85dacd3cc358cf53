#include "pinnlab/numfmt.hpp"

#include <charconv>
#include <system_error>

#include "pinnlab/errors.hpp"

namespace pinnlab {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("malformed numeric field: '" + std::string(s) + "'");
  return v;
}

}  // namespace pinnlab
