#pragma once

#include "daggp/scm.hpp"

#include <iosfwd>

namespace daggp {

/// Header row with column names, then one row per sample. Values are written
/// with round-trip precision.
void write_csv(const Dataset& data, std::ostream& out);
Dataset read_csv(std::istream& in);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

} // namespace daggp
