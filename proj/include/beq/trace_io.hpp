#pragma once

// CSV serialization of iterate traces. Reals are written with 17 significant
// digits so a re-read trace is bit-identical; vectors are ';'-joined inside
// one cell and absent optionals are empty cells.

#include "beq/iterate.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace beq {

std::vector<std::string> trace_columns(Algorithm algorithm);

void write_trace_csv(std::ostream& os, const Trace& trace);
void write_trace_csv(const std::string& path, const Trace& trace);

// Algorithm is inferred from the header (linesearch traces carry a `w` column).
Trace read_trace_csv(std::istream& is);
Trace read_trace_csv(const std::string& path);

std::string format_real(double v);

}  // namespace beq
