#include "wsfuse/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wsfuse {

namespace {

constexpr char kMagic[8] = {'W', 'S', 'F', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::ostream& out;
  void bytes(const void* p, std::size_t n) { out.write(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void str(const std::string& s) {
    u32(std::uint32_t(s.size()));
    bytes(s.data(), s.size());
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    bytes(v.data(), v.size() * sizeof(double));
  }
  void sizes(const std::vector<std::size_t>& v) {
    u64(v.size());
    for (std::size_t x : v) u64(x);
  }
};

struct Reader {
  std::istream& in;
  void bytes(void* p, std::size_t n) {
    in.read(static_cast<char*>(p), n);
    if (std::size_t(in.gcount()) != n) throw FormatError("checkpoint: truncated file");
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, 8);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 24)) throw FormatError("checkpoint: implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  std::vector<double> doubles() {
    const std::uint64_t n = u64();
    if (n > (1ull << 32)) throw FormatError("checkpoint: implausible array length");
    std::vector<double> v(n);
    bytes(v.data(), n * sizeof(double));
    return v;
  }
  std::vector<std::size_t> sizes() {
    const std::uint64_t n = u64();
    if (n > (1ull << 32)) throw FormatError("checkpoint: implausible array length");
    std::vector<std::size_t> v(n);
    for (auto& x : v) x = std::size_t(u64());
    return v;
  }
};

void write_mlp(Writer& w, const std::string& name, const Mlp& net) {
  w.str(name);
  w.u32(std::uint32_t(net.n_layers()));
  for (const auto& layer : net.layers()) {
    w.u64(layer.in_dim());
    w.u64(layer.out_dim());
    w.u8(std::uint8_t(layer.activation));
    w.doubles(layer.weights.data());
    w.doubles(layer.bias);
  }
}

Mlp read_mlp(Reader& r, const std::string& expected_name) {
  const std::string name = r.str();
  if (name != expected_name)
    throw FormatError("checkpoint: expected section '" + expected_name + "', found '" + name + "'");
  const std::uint32_t n_layers = r.u32();
  std::vector<DenseLayer> layers;
  layers.reserve(n_layers);
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    DenseLayer layer;
    const std::size_t in = std::size_t(r.u64());
    const std::size_t out = std::size_t(r.u64());
    const std::uint8_t act = r.u8();
    if (act > std::uint8_t(Activation::softmax)) throw FormatError("checkpoint: bad activation tag");
    layer.activation = Activation(act);
    auto wdata = r.doubles();
    if (wdata.size() != in * out) throw FormatError("checkpoint: weight block size mismatch");
    layer.weights = Tensor2(in, out, std::move(wdata));
    layer.bias = r.doubles();
    if (layer.bias.size() != out) throw FormatError("checkpoint: bias block size mismatch");
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

void write_adam(Writer& w, const std::string& name, const AdamState& st) {
  w.str(name);
  w.f64(st.lr);
  w.f64(st.beta1);
  w.f64(st.beta2);
  w.f64(st.eps);
  w.u64(std::uint64_t(st.step));
  w.doubles(st.m);
  w.doubles(st.v);
}

AdamState read_adam(Reader& r, const std::string& expected_name) {
  const std::string name = r.str();
  if (name != expected_name)
    throw FormatError("checkpoint: expected optimizer '" + expected_name + "', found '" + name + "'");
  AdamState st;
  st.lr = r.f64();
  st.beta1 = r.f64();
  st.beta2 = r.f64();
  st.eps = r.f64();
  st.step = (long long)(r.u64());
  st.m = r.doubles();
  st.v = r.doubles();
  if (st.m.size() != st.v.size()) throw FormatError("checkpoint: optimizer moment size mismatch");
  return st;
}

void write_config(Writer& w, const TrainConfig& c) {
  w.u64(c.epochs);
  w.u64(c.refresh_period);
  w.f64(c.eta);
  w.f64(c.gamma);
  w.f64(c.delta);
  w.f64(c.alpha);
  w.f64(c.beta);
  w.f64(c.lr_g_adv);
  w.f64(c.lr_d);
  w.f64(c.lr_lm);
  w.f64(c.lr_cls);
  w.f64(c.lr_g_guid);
  w.u64(c.batch_size);
  w.u64(c.d_z);
  w.u64(c.seed);
  w.sizes(c.trunk_hidden);
  w.sizes(c.gen_hidden);
  w.sizes(c.acc_hidden);
  w.u8(c.uniform_unit_budget ? 1 : 0);
  w.u8(c.track_frechet ? 1 : 0);
  w.u64(c.frechet_samples);
}

TrainConfig read_config(Reader& r) {
  TrainConfig c;
  c.epochs = std::size_t(r.u64());
  c.refresh_period = std::size_t(r.u64());
  c.eta = r.f64();
  c.gamma = r.f64();
  c.delta = r.f64();
  c.alpha = r.f64();
  c.beta = r.f64();
  c.lr_g_adv = r.f64();
  c.lr_d = r.f64();
  c.lr_lm = r.f64();
  c.lr_cls = r.f64();
  c.lr_g_guid = r.f64();
  c.batch_size = std::size_t(r.u64());
  c.d_z = std::size_t(r.u64());
  c.seed = r.u64();
  c.trunk_hidden = r.sizes();
  c.gen_hidden = r.sizes();
  c.acc_hidden = r.sizes();
  c.uniform_unit_budget = r.u8() != 0;
  c.track_frechet = r.u8() != 0;
  c.frechet_samples = std::size_t(r.u64());
  return c;
}

}  // namespace

void save_checkpoint(const TrainState& state, const std::string& path) {
  std::ostringstream buf(std::ios::binary);
  Writer w{buf};
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  write_config(w, state.config);
  w.u64(state.epoch);
  for (std::uint64_t word : state.rng.state()) w.u64(word);
  w.f64(state.subset_utility);
  w.f64(state.subset_cost);
  w.f64(state.subset_budget);

  w.u64(state.generator.d_z);
  w.u64(state.generator.n_classes);
  write_mlp(w, "generator", state.generator.net);
  write_mlp(w, "trunk", state.trunk);
  write_mlp(w, "d_head", state.d_head);
  write_mlp(w, "cls_head", state.cls_head);
  write_mlp(w, "accuracy_net", state.label_model.accuracy_net);
  write_mlp(w, "alignment_head", state.label_model.alignment_head);

  write_adam(w, "opt_g_adv", state.opt_g_adv);
  write_adam(w, "opt_d", state.opt_d);
  write_adam(w, "opt_lm", state.opt_lm);
  write_adam(w, "opt_cls", state.opt_cls);
  write_adam(w, "opt_g_guid", state.opt_g_guid);

  w.u8(state.subset.has_value() ? 1 : 0);
  if (state.subset) {
    w.u64(state.subset->created_epoch);
    w.sizes(state.subset->indices);
    w.u64(state.subset->onehot.rows());
    w.u64(state.subset->onehot.cols());
    w.doubles(state.subset->onehot.data());
  }

  // atomic-ish write: assemble in memory, then dump
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write checkpoint " + path);
  const std::string bytes = buf.str();
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw FormatError("failed writing checkpoint " + path);
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path);
  Reader r{in};
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("checkpoint: bad magic bytes");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError("checkpoint: unsupported format version " + std::to_string(version));

  TrainState st;
  st.config = read_config(r);
  st.epoch = std::size_t(r.u64());
  std::array<std::uint64_t, 4> rng_state;
  for (auto& word : rng_state) word = r.u64();
  st.rng.set_state(rng_state);
  st.subset_utility = r.f64();
  st.subset_cost = r.f64();
  st.subset_budget = r.f64();

  st.generator.d_z = std::size_t(r.u64());
  st.generator.n_classes = std::size_t(r.u64());
  st.generator.net = read_mlp(r, "generator");
  st.trunk = read_mlp(r, "trunk");
  st.d_head = read_mlp(r, "d_head");
  st.cls_head = read_mlp(r, "cls_head");
  st.label_model.accuracy_net = read_mlp(r, "accuracy_net");
  st.label_model.alignment_head = read_mlp(r, "alignment_head");

  st.opt_g_adv = read_adam(r, "opt_g_adv");
  st.opt_d = read_adam(r, "opt_d");
  st.opt_lm = read_adam(r, "opt_lm");
  st.opt_cls = read_adam(r, "opt_cls");
  st.opt_g_guid = read_adam(r, "opt_g_guid");

  if (r.u8()) {
    TrainingSubset subset;
    subset.created_epoch = std::size_t(r.u64());
    subset.indices = r.sizes();
    const std::size_t rows = std::size_t(r.u64());
    const std::size_t cols = std::size_t(r.u64());
    auto data = r.doubles();
    if (data.size() != rows * cols) throw FormatError("checkpoint: subset one-hot size mismatch");
    subset.onehot = Tensor2(rows, cols, std::move(data));
    st.subset = std::move(subset);
  }

  char trailing;
  if (in.read(&trailing, 1)) throw FormatError("checkpoint: trailing bytes after payload");
  return st;
}

}  // namespace wsfuse
