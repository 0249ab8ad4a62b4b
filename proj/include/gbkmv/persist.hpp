#pragma once

#include "gbkmv/gbkmv_sketch.hpp"

#include <iosfwd>
#include <string>

namespace gbkmv {

// Binary index format, magic "GBKM", version 1, little-endian integers,
// length-prefixed variable sections. Round-trips byte-identically.
void save_index(const GbkmvIndex& index, std::ostream& out);
void save_index_file(const GbkmvIndex& index, const std::string& path);

// Throws on bad magic, unsupported version or truncation.
GbkmvIndex load_index(std::istream& in);
GbkmvIndex load_index_file(const std::string& path);

} // namespace gbkmv
