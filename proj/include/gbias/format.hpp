#pragma once

#include <string>

namespace gbias {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace gbias
