#include "gcl/coop/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gcl/error.hpp"

namespace gcl::coop {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void matrix(const nn::Matrix& m) {
    for (double v : m.values()) f64(v);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const auto* p = reinterpret_cast<const unsigned char*>(take(4));
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto* p = reinterpret_cast<const unsigned char*>(take(8));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n), n);
  }
  void matrix(nn::Matrix& m) {
    for (double& v : m.values()) v = f64();
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::format, "checkpoint is truncated");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void write_network(Writer& w, const nn::Network& net) {
  w.u32(static_cast<std::uint32_t>(net.depth()));
  for (const auto& l : net.layers()) {
    w.u32(static_cast<std::uint32_t>(l.in_dim()));
    w.u32(static_cast<std::uint32_t>(l.out_dim()));
    w.u8(static_cast<std::uint8_t>(l.activation));
    w.matrix(l.weights);
    w.matrix(l.bias);
  }
}

nn::Network read_network(Reader& r) {
  const std::uint32_t depth = r.u32();
  std::vector<nn::DenseLayer> layers;
  for (std::uint32_t i = 0; i < depth; ++i) {
    const std::uint32_t in = r.u32();
    const std::uint32_t out = r.u32();
    const std::uint8_t act = r.u8();
    if (act > static_cast<std::uint8_t>(nn::Activation::identity)) {
      throw Error(ErrorKind::format, "checkpoint: unknown activation code");
    }
    nn::DenseLayer l{nn::Matrix(in, out), nn::Matrix(1, out), static_cast<nn::Activation>(act)};
    r.matrix(l.weights);
    r.matrix(l.bias);
    layers.push_back(std::move(l));
  }
  return nn::Network(std::move(layers));
}

void write_optimizer(Writer& w, const nn::RmspropState& s) {
  w.f64(s.options.lr);
  w.f64(s.options.momentum);
  w.f64(s.options.smoothing);
  w.f64(s.options.eps);
  for (const auto* buffers : {&s.square_avg, &s.momentum_buf}) {
    for (const auto& t : *buffers) {
      w.matrix(t.weights);
      w.matrix(t.bias);
    }
  }
}

nn::RmspropState read_optimizer(Reader& r, const nn::Network& net) {
  nn::RmspropOptions o;
  o.lr = r.f64();
  o.momentum = r.f64();
  o.smoothing = r.f64();
  o.eps = r.f64();
  nn::RmspropState s(net, o);
  for (auto* buffers : {&s.square_avg, &s.momentum_buf}) {
    for (auto& t : *buffers) {
      r.matrix(t.weights);
      r.matrix(t.bias);
    }
  }
  return s;
}

}  // namespace

std::string serialize_checkpoint(const GclModel& model) {
  Writer w;
  for (char c : kCheckpointMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kCheckpointVersion);
  w.str(config_to_json(model.config));
  w.u64(model.d);
  w.u64(model.epoch);
  w.u8(model.pretrained ? 1 : 0);
  write_network(w, model.generator);
  write_network(w, model.discriminator);
  write_optimizer(w, model.gen_opt);
  write_optimizer(w, model.disc_opt);
  std::ostringstream rng;
  rng << model.rng;
  w.str(rng.str());
  return w.take();
}

GclModel deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw Error(ErrorKind::format, "not a checkpoint (bad magic, expected GCLC)");
  }
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::format, "unsupported checkpoint version " + std::to_string(version));
  }
  GclModel m;
  m.config = config_from_json(r.str());
  m.d = r.u64();
  m.epoch = r.u64();
  m.pretrained = r.u8() != 0;
  m.generator = read_network(r);
  m.discriminator = read_network(r);
  m.gen_opt = read_optimizer(r, m.generator);
  m.disc_opt = read_optimizer(r, m.discriminator);
  std::istringstream rng(r.str());
  rng >> m.rng;
  if (!rng) throw Error(ErrorKind::format, "checkpoint: corrupt RNG state");
  if (!r.done()) throw Error(ErrorKind::format, "checkpoint: trailing bytes");
  if (m.generator.input_dim() != m.d || m.discriminator.input_dim() != m.d) {
    throw Error(ErrorKind::format, "checkpoint: network input dims disagree with d");
  }
  return m;
}

void save_checkpoint(const GclModel& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "failed writing checkpoint " + path.string());
}

GclModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_checkpoint(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace gcl::coop
