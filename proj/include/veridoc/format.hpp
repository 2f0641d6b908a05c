#pragma once

#include <string>

namespace veridoc {

/// Shortest decimal that round-trips, laid out like Python's float repr:
/// fixed notation for exponents in [-4, 16), ".0" kept on integral values.
std::string format_score(double v);

}  // namespace veridoc
