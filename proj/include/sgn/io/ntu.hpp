#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgn/io/skeleton.hpp"

namespace sgn {

// Metadata encoded in NTU file names: SsssCcccPpppRrrrAaaa.
struct NtuName {
  int setup = 0;
  int camera = 0;
  int subject = 0;
  int replication = 0;
  int action = 0;  // one-based, as in the file name

  int label() const { return action - 1; }
};

std::optional<NtuName> decode_ntu_name(std::string_view stem);

// Parses the text layout of an NTU RGB+D `.skeleton` file: a frame count, then
// per frame a body count and per body an info line, a joint count and one line
// per joint whose first three fields are x y z. Returns one sequence per body id
// in order of first appearance; frames where a body is absent are skipped for
// that body. `source` is the clip name (file stem); when it follows the NTU
// pattern the label and ids are filled in, otherwise they stay at defaults.
// Throws ParseError with the 1-based line number on malformed input.
std::vector<SkeletonSequence> parse_ntu_skeleton(std::istream& in, std::string_view source,
                                                 std::string_view dataset = "ntu");

}  // namespace sgn
