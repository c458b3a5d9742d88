#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sgn/io/protocol.hpp"
#include "sgn/model/model.hpp"
#include "sgn/train/synthetic.hpp"
#include "sgn/train/trainer.hpp"

namespace sgn {

// Flat key/value tree read from a TOML subset: `[section]` headers, `key = value`
// lines, `#` comments. Values are integers, floats, booleans, "strings" or flat
// arrays of those. Keys are stored fully qualified ("model.c1").
class ConfigTree {
 public:
  static ConfigTree parse(std::istream& in, std::string_view origin = "config");
  static ConfigTree parse_text(std::string_view text, std::string_view origin = "config");
  static ConfigTree load(const std::filesystem::path& path);

  // `key=value` with the value in the same syntax as the file.
  void apply_override(std::string_view assignment);
  void set_raw(const std::string& key, const std::string& raw_value);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback) const;

 private:
  std::map<std::string, std::string> entries_;  // key -> raw value text
};

enum class Precision { float32, float64 };

enum class DataSource { canonical, synthetic };

struct DataConfig {
  DataSource source = DataSource::canonical;
  std::string path;                   // canonical file
  std::string dataset = "ntu60";
  Protocol protocol = Protocol::cross_subject;
  std::vector<int> train_ids;         // empty: dataset defaults
  std::vector<int> test_ids;
  double validation_fraction = 0.1;
  std::size_t translation_joint = 1;  // zero-based
  SyntheticConfig synthetic;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  DataConfig data;
  Precision precision = Precision::float32;
  bool deterministic = false;
  std::uint64_t seed = 0;

  // Unknown keys are a ConfigError, so typos cannot silently fall back to defaults.
  static RunConfig from_tree(const ConfigTree& tree);
  // Fully resolved configuration in the same file syntax; from_tree(parse(to_text())) round-trips.
  std::string to_text() const;
  void validate() const;
};

}  // namespace sgn
