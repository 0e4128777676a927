#pragma once

#include "fracsum/expsum.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace fracsum {

// Text format:
//   # alpha=<a> delta=<d> T=<T> L=<L> epsilon=<e>[ reduced=true K=<K> L_p=<Lp> L_f=<Lf>]
//   <w_1>\t<b_1>
//   ...
// Terms are written as hexadecimal floats, so a save/load cycle is exact.
// The reader also accepts decimal terms.

void write_expsum(std::ostream& os, const ExpSum& es);
ExpSum read_expsum(std::istream& is);

void save_expsum(const std::filesystem::path& path, const ExpSum& es);
ExpSum load_expsum(const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_shortest(double x);
/// Hexadecimal float, e.g. -0x1.8p+0.
std::string format_hex(double x);
/// Parses decimal or hexadecimal (0x prefix) doubles. Throws IoError.
double parse_double(const std::string& s);

} // namespace fracsum
