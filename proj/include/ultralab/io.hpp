#pragma once

#include <string>

namespace ultralab {

/// Fixed float formatting for all file outputs: 17 significant digits,
/// shortest spelling %.17g gives; byte-stable across runs.
std::string fmt_g17(double v);

/// JSON string escaping for the hand-rolled writers.
std::string json_escape(const std::string& s);

} // namespace ultralab
