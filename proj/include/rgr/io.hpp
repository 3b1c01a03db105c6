#pragma once

#include <iosfwd>
#include <string>

#include "rgr/types.hpp"

namespace rgr {

// Binary matrix container: magic "RGR1", u64 LE rows, u64 LE cols, row-major
// 64-bit IEEE-754 LE payload. Round trips are bit-exact.
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);

// CSV with 17 significant digits per value (round-trip exact for doubles).
void write_matrix_csv(std::ostream& os, const Matrix& m);

}  // namespace rgr
