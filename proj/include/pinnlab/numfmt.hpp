#ifndef PINNLAB_NUMFMT_HPP
#define PINNLAB_NUMFMT_HPP

#include <string>
#include <string_view>

namespace pinnlab {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// Inverse of format_double; accepts inf/nan spellings. Throws ConfigError
// on malformed input.
double parse_double(std::string_view s);

}  // namespace pinnlab

#endif
