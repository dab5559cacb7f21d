#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "tplcov/matrix.hpp"

namespace tplcov {

// Shortest decimal form that round-trips a double (%.17g).
std::string format_number(double v);

// Comma-separated numeric rows. A first row containing any non-numeric
// field is taken as a header and skipped. Blank lines are ignored. Throws
// DataError with the 1-based line number on malformed input.
DataMatrix read_data_csv(std::istream& in);
DataMatrix read_data_csv_file(const std::string& path);

// Header x1..xp followed by one row per observation.
void write_data_csv(std::ostream& os, const DataMatrix& data);

// Header "j,k,value"; 1-based, diagonal always, off-diagonal entries only
// when nonzero, sorted by (j,k).
void write_triplets(std::ostream& os, const SymMatrix& mat);

// p rows of p comma-separated values.
void write_dense(std::ostream& os, const SymMatrix& mat);

}  // namespace tplcov
