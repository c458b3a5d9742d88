#include "sgn/model/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "sgn/error.hpp"
#include "sgn/util.hpp"

namespace sgn {

namespace {

class Writer {
 public:
  template <typename V>
  void pod(V v) {
    char buf[sizeof(V)];
    std::memcpy(buf, &v, sizeof(V));
    bytes.append(buf, sizeof(V));
  }
  void text(const std::string& s) {
    pod<std::uint64_t>(s.size());
    bytes += s;
  }
  template <typename V>
  void array(const std::vector<V>& v) {
    pod<std::uint64_t>(v.size());
    bytes.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(V));
  }
  std::string bytes;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  template <typename V>
  V pod() {
    need(sizeof(V));
    V v;
    std::memcpy(&v, data_.data() + pos_, sizeof(V));
    pos_ += sizeof(V);
    return v;
  }
  std::string text() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  template <typename V>
  std::vector<V> array() {
    const auto n = pod<std::uint64_t>();
    if (n > data_.size()) throw SchemaError("checkpoint: array length out of range");
    need(n * sizeof(V));
    std::vector<V> v(n);
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(V));
    pos_ += n * sizeof(V);
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw SchemaError("checkpoint: unexpected end of data");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

constexpr std::size_t kDigestChars = 64;

}  // namespace

template <typename T>
std::string serialize_checkpoint(const Checkpoint<T>& ckpt) {
  Writer w;
  w.bytes.append(kCheckpointMagic, 8);
  w.pod<std::uint32_t>(kCheckpointVersion);
  w.pod<std::uint8_t>(sizeof(T));
  w.text(ckpt.config_text);
  w.pod<std::uint64_t>(ckpt.epoch);
  w.text(ckpt.metrics);
  w.pod<std::uint64_t>(ckpt.tensors.size());
  for (const auto& nt : ckpt.tensors) {
    w.text(nt.name);
    w.pod<std::uint8_t>(nt.trainable ? 1 : 0);
    w.array(std::vector<std::uint64_t>(nt.tensor.shape().begin(), nt.tensor.shape().end()));
    w.array(std::vector<T>(nt.tensor.values().begin(), nt.tensor.values().end()));
  }
  w.pod<std::uint8_t>(ckpt.optimizer ? 1 : 0);
  if (ckpt.optimizer) {
    const auto& a = *ckpt.optimizer;
    w.pod<T>(a.learning_rate);
    w.pod<T>(a.beta1);
    w.pod<T>(a.beta2);
    w.pod<T>(a.epsilon);
    w.pod<T>(a.weight_decay);
    w.pod<std::int64_t>(a.step);
    w.pod<std::uint64_t>(a.first_moment.size());
    for (std::size_t i = 0; i < a.first_moment.size(); ++i) {
      w.array(a.first_moment[i]);
      w.array(a.second_moment[i]);
    }
  }
  w.bytes += sha256_hex(w.bytes);
  return std::move(w.bytes);
}

template <typename T>
Checkpoint<T> deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 + kDigestChars || bytes.compare(0, 8, kCheckpointMagic) != 0) {
    throw SchemaError("not a checkpoint file");
  }
  const std::string_view body(bytes.data(), bytes.size() - kDigestChars);
  if (sha256_hex(body) != std::string_view(bytes).substr(body.size())) {
    throw SchemaError("checkpoint digest mismatch (file truncated or modified)");
  }
  Reader r(body.substr(8));
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw SchemaError("checkpoint schema version " + std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion));
  }
  const auto width = r.pod<std::uint8_t>();
  if (width != sizeof(T)) {
    throw SchemaError("checkpoint stores " + std::to_string(width * 8) + "-bit values, reader expects " +
                      std::to_string(sizeof(T) * 8) + "-bit");
  }
  Checkpoint<T> ckpt;
  ckpt.config_text = r.text();
  ckpt.epoch = r.pod<std::uint64_t>();
  ckpt.metrics = r.text();
  const auto count = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    NamedTensor<T> nt;
    nt.name = r.text();
    nt.trainable = r.pod<std::uint8_t>() != 0;
    auto dims = r.array<std::uint64_t>();
    auto values = r.array<T>();
    Shape shape(dims.begin(), dims.end());
    if (shape_numel(shape) != values.size()) throw SchemaError("checkpoint: tensor '" + nt.name + "' size mismatch");
    nt.tensor = Tensor<T>(std::move(shape), std::move(values), nt.trainable);
    ckpt.tensors.push_back(std::move(nt));
  }
  if (r.pod<std::uint8_t>() != 0) {
    AdamState<T> a;
    a.learning_rate = r.pod<T>();
    a.beta1 = r.pod<T>();
    a.beta2 = r.pod<T>();
    a.epsilon = r.pod<T>();
    a.weight_decay = r.pod<T>();
    a.step = r.pod<std::int64_t>();
    const auto n = r.pod<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
      a.first_moment.push_back(r.array<T>());
      a.second_moment.push_back(r.array<T>());
    }
    ckpt.optimizer = std::move(a);
  }
  if (!r.done()) throw SchemaError("checkpoint: trailing bytes after optimizer state");
  return ckpt;
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const Checkpoint<T>& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint<T>(ss.str());
}

template <typename T>
std::string parameter_manifest(const std::vector<NamedTensor<T>>& tensors) {
  std::string out;
  for (const auto& nt : tensors) {
    out += nt.name + '\t' + shape_str(nt.tensor.shape()) + '\t' + std::to_string(nt.tensor.numel()) + '\t' +
           (nt.trainable ? "param" : "buffer") + '\n';
  }
  return out;
}

#define SGN_INSTANTIATE_CKPT(T)                                                   \
  template std::string serialize_checkpoint(const Checkpoint<T>&);                \
  template Checkpoint<T> deserialize_checkpoint(const std::string&);              \
  template void save_checkpoint(const std::filesystem::path&, const Checkpoint<T>&); \
  template Checkpoint<T> load_checkpoint(const std::filesystem::path&);           \
  template std::string parameter_manifest(const std::vector<NamedTensor<T>>&);

SGN_INSTANTIATE_CKPT(float)
SGN_INSTANTIATE_CKPT(double)

}  // namespace sgn
