#include "sgn/config/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sgn/error.hpp"
#include "sgn/train/trainer.hpp"

namespace sgn {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Cuts a trailing `# comment` that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == '#' && !quoted) {
      return s.substr(0, i);
    }
  }
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  }
  return true;
}

std::string unquote(std::string_view raw, const std::string& key) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') {
    throw ConfigError("key '" + key + "': expected a quoted string, got " + std::string(raw));
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 2 < raw.size()) {
      const char n = raw[++i];
      out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
    } else {
      out += raw[i];
    }
  }
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

template <typename V>
V parse_number(std::string_view raw, const std::string& key) {
  V v{};
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size()) {
    throw ConfigError("key '" + key + "': '" + std::string(raw) + "' is not a valid number");
  }
  return v;
}

std::vector<std::string_view> split_array(std::string_view raw, const std::string& key) {
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
    throw ConfigError("key '" + key + "': expected an array like [1, 2], got " + std::string(raw));
  }
  std::vector<std::string_view> items;
  std::string_view inner = trim(raw.substr(1, raw.size() - 2));
  while (!inner.empty()) {
    const auto comma = inner.find(',');
    items.push_back(trim(inner.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    inner = trim(inner.substr(comma + 1));
  }
  return items;
}

template <typename V>
std::string join(const std::vector<V>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

ConfigTree ConfigTree::parse(std::istream& in, std::string_view origin) {
  ConfigTree tree;
  std::string section;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(number) + ": ";
    if (body.front() == '[') {
      if (body.back() != ']' || !valid_key(trim(body.substr(1, body.size() - 2)))) {
        throw ConfigError(where + "malformed section header");
      }
      section = std::string(trim(body.substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string_view key = trim(body.substr(0, eq));
    const std::string_view value = trim(body.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + "invalid key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(where + "missing value for '" + std::string(key) + "'");
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (tree.entries_.count(full)) throw ConfigError(where + "duplicate key '" + full + "'");
    tree.entries_[full] = std::string(value);
  }
  return tree;
}

ConfigTree ConfigTree::parse_text(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  return parse(in, origin);
}

ConfigTree ConfigTree::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

void ConfigTree::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' needs key=value");
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string value(trim(assignment.substr(eq + 1)));
  if (!valid_key(key) || value.empty()) throw ConfigError("malformed override '" + std::string(assignment) + "'");
  entries_[key] = value;
}

void ConfigTree::set_raw(const std::string& key, const std::string& raw_value) { entries_[key] = raw_value; }

std::string ConfigTree::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  // Bare words are accepted for convenience on the command line.
  if (!it->second.empty() && it->second.front() != '"') return it->second;
  return unquote(it->second, key);
}

std::int64_t ConfigTree::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_number<std::int64_t>(it->second, key);
}

double ConfigTree::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_number<double>(it->second, key);
}

bool ConfigTree::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw ConfigError("key '" + key + "': expected true or false, got " + it->second);
}

std::vector<std::int64_t> ConfigTree::get_int_list(const std::string& key,
                                                   const std::vector<std::int64_t>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<std::int64_t> out;
  for (auto item : split_array(it->second, key)) out.push_back(parse_number<std::int64_t>(item, key));
  return out;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed", "deterministic", "precision",
      "model.scales", "model.num_classes", "model.num_joints", "model.c1", "model.c2", "model.gcn_dims",
      "model.c4", "model.frame_hidden", "model.temporal_kernel", "model.frame_index", "model.share_frame_index",
      "model.share_trunk", "model.velocity", "model.partition", "model.graph_uses_joint_type",
      "model.passing_uses_joint_type", "model.bn_momentum", "model.bn_epsilon",
      "train.epochs", "train.lr", "train.decay_epochs", "train.decay_factor", "train.weight_decay",
      "train.batch_size", "train.label_smoothing", "train.rotation_deg", "train.augment", "train.validate_every",
      "train.eval_views", "train.checkpoint_every",
      "data.source", "data.path", "data.dataset", "data.protocol", "data.train_ids", "data.test_ids",
      "data.validation_fraction", "data.translation_joint", "data.synthetic_train_per_class",
      "data.synthetic_test_per_class", "data.synthetic_min_frames", "data.synthetic_max_frames",
      "data.synthetic_noise", "data.synthetic_seed",
  };
  return keys;
}

std::size_t get_size(const ConfigTree& t, const std::string& key, std::size_t fallback) {
  const auto v = t.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError("key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

template <typename V>
std::vector<V> get_list(const ConfigTree& t, const std::string& key, const std::vector<V>& fallback) {
  std::vector<std::int64_t> fb(fallback.begin(), fallback.end());
  std::vector<V> out;
  for (auto v : t.get_int_list(key, fb)) {
    if (v < 0) throw ConfigError("key '" + key + "' must list non-negative values");
    out.push_back(static_cast<V>(v));
  }
  return out;
}

}  // namespace

RunConfig RunConfig::from_tree(const ConfigTree& t) {
  for (const auto& [key, value] : t.entries()) {
    if (!known_keys().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
  RunConfig c;
  c.seed = static_cast<std::uint64_t>(t.get_int("seed", 0));
  c.deterministic = t.get_bool("deterministic", false);
  const std::string precision = t.get_string("precision", "float32");
  if (precision == "float32") {
    c.precision = Precision::float32;
  } else if (precision == "float64") {
    c.precision = Precision::float64;
  } else {
    throw ConfigError("precision must be float32 or float64, got '" + precision + "'");
  }

  ModelConfig& m = c.model;
  m.scales = get_list<std::size_t>(t, "model.scales", m.scales);
  m.num_classes = get_size(t, "model.num_classes", m.num_classes);
  m.num_joints = get_size(t, "model.num_joints", m.num_joints);
  m.c1 = get_size(t, "model.c1", m.c1);
  m.c2 = get_size(t, "model.c2", m.c2);
  m.gcn_dims = get_list<std::size_t>(t, "model.gcn_dims", m.gcn_dims);
  m.c4 = get_size(t, "model.c4", m.c4);
  m.frame_hidden = get_size(t, "model.frame_hidden", m.frame_hidden);
  m.temporal_kernel = get_size(t, "model.temporal_kernel", m.temporal_kernel);
  m.frame_index = t.get_bool("model.frame_index", m.frame_index);
  m.share_frame_index = t.get_bool("model.share_frame_index", m.share_frame_index);
  m.share_trunk = t.get_bool("model.share_trunk", m.share_trunk);
  m.velocity = t.get_bool("model.velocity", m.velocity);
  m.movement = parse_movement_preset(t.get_string("model.partition", std::string(movement_preset_name(m.movement))));
  m.graph_uses_joint_type = t.get_bool("model.graph_uses_joint_type", m.graph_uses_joint_type);
  m.passing_uses_joint_type = t.get_bool("model.passing_uses_joint_type", m.passing_uses_joint_type);
  m.bn_momentum = t.get_double("model.bn_momentum", m.bn_momentum);
  m.bn_epsilon = t.get_double("model.bn_epsilon", m.bn_epsilon);
  m.init_seed = c.seed;

  TrainConfig& tr = c.train;
  tr.epochs = get_size(t, "train.epochs", tr.epochs);
  tr.lr = t.get_double("train.lr", tr.lr);
  tr.decay_epochs = get_list<std::size_t>(t, "train.decay_epochs", tr.decay_epochs);
  tr.decay_factor = t.get_double("train.decay_factor", tr.decay_factor);
  tr.weight_decay = t.get_double("train.weight_decay", tr.weight_decay);
  tr.batch_size = get_size(t, "train.batch_size", tr.batch_size);
  tr.label_smoothing = t.get_double("train.label_smoothing", tr.label_smoothing);
  tr.augment.rotation_deg = t.get_double("train.rotation_deg", tr.augment.rotation_deg);
  tr.augment.enabled = t.get_bool("train.augment", tr.augment.enabled);
  tr.validate_every = get_size(t, "train.validate_every", tr.validate_every);
  tr.eval_views = get_size(t, "train.eval_views", tr.eval_views);
  tr.checkpoint_every = get_size(t, "train.checkpoint_every", tr.checkpoint_every);
  tr.seed = c.seed;

  DataConfig& d = c.data;
  const std::string source = t.get_string("data.source", "canonical");
  if (source == "canonical") {
    d.source = DataSource::canonical;
  } else if (source == "synthetic") {
    d.source = DataSource::synthetic;
  } else {
    throw ConfigError("data.source must be canonical or synthetic, got '" + source + "'");
  }
  d.path = t.get_string("data.path", d.path);
  d.dataset = t.get_string("data.dataset", d.dataset);
  d.protocol = parse_protocol(t.get_string("data.protocol", std::string(protocol_name(d.protocol))));
  d.train_ids = get_list<int>(t, "data.train_ids", d.train_ids);
  d.test_ids = get_list<int>(t, "data.test_ids", d.test_ids);
  d.validation_fraction = t.get_double("data.validation_fraction", d.validation_fraction);
  d.translation_joint = get_size(t, "data.translation_joint", d.translation_joint);
  d.synthetic.train_per_class = get_size(t, "data.synthetic_train_per_class", d.synthetic.train_per_class);
  d.synthetic.test_per_class = get_size(t, "data.synthetic_test_per_class", d.synthetic.test_per_class);
  d.synthetic.min_frames = get_size(t, "data.synthetic_min_frames", d.synthetic.min_frames);
  d.synthetic.max_frames = get_size(t, "data.synthetic_max_frames", d.synthetic.max_frames);
  d.synthetic.noise = t.get_double("data.synthetic_noise", d.synthetic.noise);
  d.synthetic.seed = static_cast<std::uint64_t>(t.get_int("data.synthetic_seed", static_cast<std::int64_t>(d.synthetic.seed)));
  c.validate();
  return c;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (data.validation_fraction < 0.0 || data.validation_fraction >= 1.0) {
    throw ConfigError("data.validation_fraction must lie in [0, 1)");
  }
  if (data.translation_joint >= model.num_joints) throw ConfigError("data.translation_joint outside the joint range");
  if (data.source == DataSource::canonical && data.path.empty()) {
    throw ConfigError("data.path is required for canonical data");
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o << "seed = " << seed << '\n'
    << "deterministic = " << bool_text(deterministic) << '\n'
    << "precision = " << quote(precision == Precision::float32 ? "float32" : "float64") << "\n\n";
  o << "[model]\n"
    << "scales = " << join(model.scales) << '\n'
    << "num_classes = " << model.num_classes << '\n'
    << "num_joints = " << model.num_joints << '\n'
    << "c1 = " << model.c1 << '\n'
    << "c2 = " << model.c2 << '\n'
    << "gcn_dims = " << join(model.gcn_dims) << '\n'
    << "c4 = " << model.c4 << '\n'
    << "frame_hidden = " << model.frame_hidden << '\n'
    << "temporal_kernel = " << model.temporal_kernel << '\n'
    << "frame_index = " << bool_text(model.frame_index) << '\n'
    << "share_frame_index = " << bool_text(model.share_frame_index) << '\n'
    << "share_trunk = " << bool_text(model.share_trunk) << '\n'
    << "velocity = " << bool_text(model.velocity) << '\n'
    << "partition = " << quote(std::string(movement_preset_name(model.movement))) << '\n'
    << "graph_uses_joint_type = " << bool_text(model.graph_uses_joint_type) << '\n'
    << "passing_uses_joint_type = " << bool_text(model.passing_uses_joint_type) << '\n'
    << "bn_momentum = " << format_double(model.bn_momentum) << '\n'
    << "bn_epsilon = " << format_double(model.bn_epsilon) << "\n\n";
  o << "[train]\n"
    << "epochs = " << train.epochs << '\n'
    << "lr = " << format_double(train.lr) << '\n'
    << "decay_epochs = " << join(train.decay_epochs) << '\n'
    << "decay_factor = " << format_double(train.decay_factor) << '\n'
    << "weight_decay = " << format_double(train.weight_decay) << '\n'
    << "batch_size = " << train.batch_size << '\n'
    << "label_smoothing = " << format_double(train.label_smoothing) << '\n'
    << "rotation_deg = " << format_double(train.augment.rotation_deg) << '\n'
    << "augment = " << bool_text(train.augment.enabled) << '\n'
    << "validate_every = " << train.validate_every << '\n'
    << "eval_views = " << train.eval_views << '\n'
    << "checkpoint_every = " << train.checkpoint_every << "\n\n";
  o << "[data]\n"
    << "source = " << quote(data.source == DataSource::canonical ? "canonical" : "synthetic") << '\n'
    << "path = " << quote(data.path) << '\n'
    << "dataset = " << quote(data.dataset) << '\n'
    << "protocol = " << quote(std::string(protocol_name(data.protocol))) << '\n'
    << "train_ids = " << join(data.train_ids) << '\n'
    << "test_ids = " << join(data.test_ids) << '\n'
    << "validation_fraction = " << format_double(data.validation_fraction) << '\n'
    << "translation_joint = " << data.translation_joint << '\n'
    << "synthetic_train_per_class = " << data.synthetic.train_per_class << '\n'
    << "synthetic_test_per_class = " << data.synthetic.test_per_class << '\n'
    << "synthetic_min_frames = " << data.synthetic.min_frames << '\n'
    << "synthetic_max_frames = " << data.synthetic.max_frames << '\n'
    << "synthetic_noise = " << format_double(data.synthetic.noise) << '\n'
    << "synthetic_seed = " << data.synthetic.seed << '\n';
  return o.str();
}

}  // namespace sgn
