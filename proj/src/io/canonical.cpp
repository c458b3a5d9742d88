#include "sgn/io/canonical.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

#include "sgn/error.hpp"

namespace sgn {

namespace {

void append_float(std::string& out, float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename V>
V field_number(std::string_view token, std::size_t record, const char* what) {
  V value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DataError("canonical record " + std::to_string(record) + ": bad " + what + " '" +
                    std::string(token) + "'");
  }
  return value;
}

}  // namespace

void write_canonical_header(std::ostream& out) {
  out << kCanonicalMagic << ' ' << kCanonicalVersion << '\n';
}

std::string write_canonical(const SkeletonSequence& seq) {
  for (std::string_view text : {std::string_view(seq.dataset), std::string_view(seq.source)}) {
    if (text.find_first_of("\t\n") != std::string_view::npos) {
      throw DataError("dataset and source names may not contain tabs or newlines");
    }
  }
  if (seq.coords.size() != seq.frames * seq.joints * 3) {
    throw DataError("sequence '" + seq.source + "' has " + std::to_string(seq.coords.size()) +
                    " coordinates for T=" + std::to_string(seq.frames) + " J=" + std::to_string(seq.joints));
  }
  std::string line;
  line.reserve(16 + seq.coords.size() * 11);
  line += std::to_string(kCanonicalVersion);
  line += '\t';
  line += seq.dataset;
  for (long v : {long(seq.label), long(seq.subject_id), long(seq.camera_id), long(seq.setup_id),
                 long(seq.body_id), long(seq.frames), long(seq.joints)}) {
    line += '\t';
    line += std::to_string(v);
  }
  for (float c : seq.coords) {
    line += '\t';
    append_float(line, c);
  }
  line += '\t';
  line += seq.source;
  return line;
}

std::vector<SkeletonSequence> load_canonical(std::istream& in) {
  std::vector<SkeletonSequence> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  {
    const std::string prefix = std::string(kCanonicalMagic) + ' ';
    if (line.rfind(prefix, 0) != 0) throw SchemaError("missing canonical header line");
    int version = 0;
    std::string_view rest = std::string_view(line).substr(prefix.size());
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), version);
    if (ec != std::errc() || version != kCanonicalVersion) {
      throw SchemaError("unsupported canonical schema version '" + std::string(rest) + "' (expected " +
                        std::to_string(kCanonicalVersion) + ")");
    }
  }
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() < 10) {
      throw DataError("canonical record " + std::to_string(record) + ": too few fields");
    }
    const int version = field_number<int>(fields[0], record, "version");
    if (version != kCanonicalVersion) {
      throw SchemaError("canonical record " + std::to_string(record) + ": schema version " +
                        std::to_string(version) + " (expected " + std::to_string(kCanonicalVersion) + ")");
    }
    SkeletonSequence seq;
    seq.dataset = std::string(fields[1]);
    seq.label = field_number<int>(fields[2], record, "label");
    seq.subject_id = field_number<int>(fields[3], record, "subject");
    seq.camera_id = field_number<int>(fields[4], record, "camera");
    seq.setup_id = field_number<int>(fields[5], record, "setup");
    seq.body_id = field_number<int>(fields[6], record, "body");
    seq.frames = field_number<std::size_t>(fields[7], record, "frame count");
    seq.joints = field_number<std::size_t>(fields[8], record, "joint count");
    const std::size_t expected = seq.frames * seq.joints * 3;
    if (seq.frames == 0 || seq.joints == 0 || fields.size() != 10 + expected) {
      throw DataError("canonical record " + std::to_string(record) + ": expected " +
                      std::to_string(expected) + " coordinates, found " +
                      std::to_string(fields.size() >= 10 ? fields.size() - 10 : 0));
    }
    seq.coords.reserve(expected);
    for (std::size_t i = 0; i < expected; ++i) {
      const float v = field_number<float>(fields[9 + i], record, "coordinate");
      if (!std::isfinite(v)) throw DataError("canonical record " + std::to_string(record) + ": non-finite coordinate");
      seq.coords.push_back(v);
    }
    seq.source = std::string(fields.back());
    out.push_back(std::move(seq));
    ++record;
  }
  return out;
}

}  // namespace sgn
