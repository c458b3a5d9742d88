#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "sgn/io/skeleton.hpp"

namespace sgn {

// Line-delimited canonical dataset format.
//
//   line 1:  sgn-canonical <version>
//   records: tab-separated fields
//            version dataset label subject camera setup body T J <3*T*J coords> source
//
// Coordinates use the shortest decimal form that round-trips a 32-bit float, so
// write -> load is bit-exact.
inline constexpr int kCanonicalVersion = 1;
inline constexpr const char* kCanonicalMagic = "sgn-canonical";

void write_canonical_header(std::ostream& out);
std::string write_canonical(const SkeletonSequence& seq);

// Empty stream -> empty list. Version mismatches raise SchemaError, malformed
// records raise DataError naming the zero-based record index.
std::vector<SkeletonSequence> load_canonical(std::istream& in);

}  // namespace sgn
