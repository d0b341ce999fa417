#include "dcrnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "dcrnet/io_util.hpp"

namespace dcrnet {

namespace {

constexpr char kMagic[5] = {'D', 'C', 'R', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_i64(std::string& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

void put_doubles(std::string& out, const std::vector<double>& values) {
  put_u64(out, values.size());
  for (double v : values) put_f64(out, v);
}

void put_str_list(std::string& out, const std::vector<std::string>& list) {
  put_u64(out, list.size());
  for (const std::string& s : list) put_str(out, s);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= std::uint64_t(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> doubles() {
    const std::uint64_t n = u64();
    std::vector<double> v(n);
    for (std::uint64_t i = 0; i < n; ++i) v[i] = f64();
    return v;
  }
  std::vector<std::string> str_list() {
    const std::uint64_t n = u64();
    std::vector<std::string> v;
    v.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(str());
    return v;
  }
  void raw(char* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::uint64_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw std::runtime_error("checkpoint truncated");
    }
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint Checkpoint::capture(const Model& model, const AdamState& optimizer,
                               const Vocabulary& vocab, const LabelMap& da,
                               const LabelMap& sentiment, std::int64_t epoch,
                               double dev_da_f1, double dev_sc_f1) {
  Checkpoint out;
  out.config = model.config();
  out.vocab_tokens = vocab.tokens();
  out.da_labels = da.labels();
  out.sentiment_labels = sentiment.labels();
  out.epoch = epoch;
  out.dev_da_f1 = dev_da_f1;
  out.dev_sc_f1 = dev_sc_f1;

  std::vector<NamedParam> params = model.parameters();
  out.params.reserve(params.size());
  for (const NamedParam& p : params) {
    out.params.push_back({p.name, p.tensor.rows(), p.tensor.cols(),
                          p.tensor.values()});
  }
  out.adam_step = optimizer.step;
  if (!optimizer.m.empty()) {
    if (optimizer.m.size() != params.size()) {
      throw std::invalid_argument(
          "checkpoint: optimizer tracks " + std::to_string(optimizer.m.size()) +
          " tensors but the model has " + std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      out.adam_m.push_back(optimizer.m[i].values());
      out.adam_v.push_back(optimizer.v[i].values());
    }
  }
  return out;
}

std::string checkpoint_bytes(const Checkpoint& checkpoint) {
  std::string out;
  out.append(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_str(out, checkpoint.config.to_kv_text());
  put_str_list(out, checkpoint.vocab_tokens);
  put_str_list(out, checkpoint.da_labels);
  put_str_list(out, checkpoint.sentiment_labels);
  put_i64(out, checkpoint.epoch);
  put_f64(out, checkpoint.dev_da_f1);
  put_f64(out, checkpoint.dev_sc_f1);

  put_u64(out, checkpoint.params.size());
  for (const Checkpoint::ParamBlob& blob : checkpoint.params) {
    put_str(out, blob.name);
    put_i64(out, blob.rows);
    put_i64(out, blob.cols);
    put_doubles(out, blob.values);
  }
  put_i64(out, checkpoint.adam_step);
  put_u64(out, checkpoint.adam_m.size());
  for (const std::vector<double>& m : checkpoint.adam_m) put_doubles(out, m);
  put_u64(out, checkpoint.adam_v.size());
  for (const std::vector<double>& v : checkpoint.adam_v) put_doubles(out, v);

  put_u64(out, fnv1a(out));
  return out;
}

Checkpoint checkpoint_from_bytes(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic + 4 + 8 ||
      bytes.compare(0, sizeof kMagic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("not a checkpoint file (bad magic)");
  }
  const std::string payload = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (tail.u64() != fnv1a(payload)) {
    throw std::runtime_error("checkpoint integrity hash mismatch");
  }

  Reader in(payload);
  char magic[sizeof kMagic];
  in.raw(magic, sizeof kMagic);
  const std::uint32_t version = in.u32();
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  }
  Checkpoint out;
  out.config = ModelConfig::from_kv_text(in.str());
  out.vocab_tokens = in.str_list();
  out.da_labels = in.str_list();
  out.sentiment_labels = in.str_list();
  out.epoch = in.i64();
  out.dev_da_f1 = in.f64();
  out.dev_sc_f1 = in.f64();

  const std::uint64_t n_params = in.u64();
  out.params.reserve(n_params);
  for (std::uint64_t i = 0; i < n_params; ++i) {
    Checkpoint::ParamBlob blob;
    blob.name = in.str();
    blob.rows = in.i64();
    blob.cols = in.i64();
    blob.values = in.doubles();
    if (static_cast<std::int64_t>(blob.values.size()) !=
        blob.rows * blob.cols) {
      throw std::runtime_error("checkpoint tensor \"" + blob.name +
                               "\" has inconsistent dimensions");
    }
    out.params.push_back(std::move(blob));
  }
  out.adam_step = in.i64();
  const std::uint64_t n_m = in.u64();
  for (std::uint64_t i = 0; i < n_m; ++i) out.adam_m.push_back(in.doubles());
  const std::uint64_t n_v = in.u64();
  for (std::uint64_t i = 0; i < n_v; ++i) out.adam_v.push_back(in.doubles());
  return out;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  atomic_write_file(path, checkpoint_bytes(checkpoint));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_bytes(read_file(path));
}

Model restore_model(const Checkpoint& checkpoint) {
  Rng scratch(0);  // every value is overwritten below
  Model model(checkpoint.config,
              static_cast<std::int64_t>(checkpoint.vocab_tokens.size()),
              static_cast<std::int64_t>(checkpoint.da_labels.size()),
              static_cast<std::int64_t>(checkpoint.sentiment_labels.size()),
              scratch);
  std::unordered_map<std::string, const Checkpoint::ParamBlob*> by_name;
  for (const Checkpoint::ParamBlob& blob : checkpoint.params) {
    by_name[blob.name] = &blob;
  }
  std::vector<NamedParam> params = model.parameters();
  if (params.size() != checkpoint.params.size()) {
    throw std::runtime_error(
        "checkpoint holds " + std::to_string(checkpoint.params.size()) +
        " tensors but the configuration builds " +
        std::to_string(params.size()));
  }
  for (NamedParam& p : params) {
    auto found = by_name.find(p.name);
    if (found == by_name.end()) {
      throw std::runtime_error("checkpoint is missing tensor \"" + p.name +
                               "\"");
    }
    const Checkpoint::ParamBlob& blob = *found->second;
    if (blob.rows != p.tensor.rows() || blob.cols != p.tensor.cols() ||
        static_cast<std::int64_t>(blob.values.size()) !=
            blob.rows * blob.cols) {
      throw std::runtime_error("checkpoint tensor \"" + p.name +
                               "\" has shape " + std::to_string(blob.rows) +
                               "x" + std::to_string(blob.cols) +
                               ", expected " + p.tensor.shape_str());
    }
    p.tensor.values_mut() = blob.values;
  }
  return model;
}

Vocabulary restore_vocab(const Checkpoint& checkpoint) {
  const std::vector<std::string>& tokens = checkpoint.vocab_tokens;
  if (tokens.size() < 2 || tokens[0] != "<pad>" || tokens[1] != "<unk>") {
    throw std::runtime_error(
        "checkpoint vocabulary does not start with the reserved rows");
  }
  return Vocabulary::from_tokens(
      std::vector<std::string>(tokens.begin() + 2, tokens.end()),
      checkpoint.config.min_freq);
}

AdamState restore_adam(const Checkpoint& checkpoint, const Model& model) {
  std::vector<Tensor> tensors;
  for (const NamedParam& p : model.parameters()) tensors.push_back(p.tensor);
  AdamState state = AdamState::init(tensors);
  state.step = checkpoint.adam_step;
  if (checkpoint.adam_m.empty()) return state;
  if (checkpoint.adam_m.size() != tensors.size() ||
      checkpoint.adam_v.size() != tensors.size()) {
    throw std::runtime_error("checkpoint optimizer state does not match the "
                             "parameter list");
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (checkpoint.adam_m[i].size() != state.m[i].values().size()) {
      throw std::runtime_error("checkpoint optimizer moment size mismatch");
    }
    state.m[i].values_mut() = checkpoint.adam_m[i];
    state.v[i].values_mut() = checkpoint.adam_v[i];
  }
  return state;
}

}  // namespace dcrnet
