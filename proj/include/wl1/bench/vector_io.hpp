#pragma once

// Vector file: 8-byte magic "WL1VEC01", u64 little-endian length d, then d
// IEEE-754 binary64 little-endian values.

#include "wl1/types.hpp"

#include <string>

namespace wl1::bench {

inline constexpr char kVectorMagic[8] = {'W', 'L', '1', 'V', 'E', 'C', '0', '1'};

Vector<double> read_vector_file(const std::string &path);
void write_vector_file(const std::string &path, const Vector<double> &x);

} // namespace wl1::bench
