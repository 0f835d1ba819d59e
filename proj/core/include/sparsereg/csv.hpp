#pragma once

#include <iosfwd>
#include <string>

namespace sparsereg {

// Canonical float formatting for every CSV the toolkit writes: shortest
// round-trippable representation, so identical values always serialize
// to identical bytes.
std::string format_double(double v);

void write_csv_field(std::ostream& out, const std::string& field);

}  // namespace sparsereg
