#include "sgn/io/ntu.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include "sgn/error.hpp"

namespace sgn {

std::optional<NtuName> decode_ntu_name(std::string_view stem) {
  static const std::regex pattern(R"(S(\d{3})C(\d{3})P(\d{3})R(\d{3})A(\d{3}))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(stem.begin(), stem.end(), m, pattern)) return std::nullopt;
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  NtuName name{num(1), num(2), num(3), num(4), num(5)};
  if (name.action < 1) return std::nullopt;
  return name;
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split on whitespace; throws on end of input.
  std::vector<std::string_view> next(const char* expecting) {
    while (std::getline(in_, line_)) {
      ++number_;
      tokens_.clear();
      std::size_t i = 0;
      while (i < line_.size()) {
        while (i < line_.size() && std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
        std::size_t j = i;
        while (j < line_.size() && !std::isspace(static_cast<unsigned char>(line_[j]))) ++j;
        if (j > i) tokens_.emplace_back(line_.data() + i, j - i);
        i = j;
      }
      if (!tokens_.empty()) return tokens_;
    }
    throw ParseError(std::string("truncated file, expected ") + expecting, number_ + 1);
  }

  std::size_t line() const { return number_; }

  template <typename V>
  V number(std::string_view token, const char* what) const {
    V value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ParseError(std::string("non-numeric ") + what + " '" + std::string(token) + "'", number_);
    }
    return value;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> tokens_;
  std::size_t number_ = 0;
};

}  // namespace

std::vector<SkeletonSequence> parse_ntu_skeleton(std::istream& in, std::string_view source,
                                                 std::string_view dataset) {
  LineReader reader(in);
  auto header = reader.next("frame count");
  const long frame_count = reader.number<long>(header[0], "frame count");
  if (frame_count < 0) throw ParseError("negative frame count", reader.line());

  std::map<std::string, std::size_t, std::less<>> index_of_body;
  std::vector<SkeletonSequence> bodies;
  std::size_t joint_count = 0;

  for (long f = 0; f < frame_count; ++f) {
    auto count_line = reader.next("body count");
    const long body_count = reader.number<long>(count_line[0], "body count");
    if (body_count < 0) throw ParseError("negative body count", reader.line());
    for (long b = 0; b < body_count; ++b) {
      auto info = reader.next("body info line");
      const std::string body_key(info[0]);
      auto joints_line = reader.next("joint count");
      const long declared = reader.number<long>(joints_line[0], "joint count");
      if (declared <= 0) throw ParseError("joint count must be positive", reader.line());
      if (joint_count == 0) {
        joint_count = static_cast<std::size_t>(declared);
      } else if (static_cast<std::size_t>(declared) != joint_count) {
        throw ParseError("joint count " + std::to_string(declared) + " differs from " +
                             std::to_string(joint_count) + " declared earlier",
                         reader.line());
      }
      auto it = index_of_body.find(body_key);
      if (it == index_of_body.end()) {
        it = index_of_body.emplace(body_key, bodies.size()).first;
        SkeletonSequence seq;
        seq.joints = joint_count;
        seq.body_id = static_cast<int>(bodies.size());
        bodies.push_back(std::move(seq));
      }
      SkeletonSequence& seq = bodies[it->second];
      for (long k = 0; k < declared; ++k) {
        auto joint = reader.next("joint line");
        if (joint.size() < 3) {
          throw ParseError("joint line needs at least x y z, got " + std::to_string(joint.size()) +
                               " fields",
                           reader.line());
        }
        for (int c = 0; c < 3; ++c) {
          const float v = reader.number<float>(joint[c], "coordinate");
          if (!std::isfinite(v)) throw ParseError("non-finite coordinate", reader.line());
          seq.coords.push_back(v);
        }
      }
      seq.frames += 1;
    }
  }

  std::optional<NtuName> name;
  if (!source.empty()) name = decode_ntu_name(source);
  for (auto& seq : bodies) {
    seq.source = std::string(source);
    seq.dataset = std::string(dataset);
    if (name) {
      seq.label = name->label();
      seq.subject_id = name->subject;
      seq.camera_id = name->camera;
      seq.setup_id = name->setup;
    }
  }
  return bodies;
}

}  // namespace sgn
