#include "sdec/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace sdec {

namespace {

constexpr char kEmbeddingMagic[4] = {'S', 'D', 'E', 'C'};
constexpr char kCheckpointMagic[4] = {'S', 'D', 'C', 'K'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void write_to(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
  }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(std::vector<std::uint8_t> data, std::string path)
      : data_(std::move(data)), path_(std::move(path)) {}

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::truncated, "'" + path_ + "': truncated while reading " + what);
    }
  }
  void bytes(void* out, std::size_t n, const char* what) {
    need(n, what);
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint64_t uint(int width, const char* what) {
    need(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(uint(1, what)); }
  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(uint(2, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(uint(4, what)); }
  std::uint64_t u64(const char* what) { return uint(8, what); }
  double f32(const char* what) {
    return static_cast<double>(std::bit_cast<float>(u32(what)));
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  const std::string& path() const noexcept { return path_; }

 private:
  std::vector<std::uint8_t> data_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > UINT32_MAX) throw Error(ErrorCode::invalid_argument, std::string(what) + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

void write_header(Writer& w, const EmbeddingFileHeader& h) {
  const auto bytes = encode_header(h);
  w.bytes(bytes.data(), bytes.size());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    lines.push_back(start == std::string::npos ? std::string() : line.substr(start));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

bool parse_int(const std::string& s, long long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

void write_dense(Writer& w, const DenseLayer& l) {
  for (const double v : l.weights.data()) w.f64(v);
  for (const double v : l.bias) w.f64(v);
}

DenseLayer read_dense(Reader& r, std::size_t in, std::size_t out) {
  const std::uint64_t count = std::uint64_t{in} * out + out;
  if (count > r.remaining() / 8) {
    throw Error(ErrorCode::truncated, "'" + r.path() + "': layer payload exceeds file size");
  }
  DenseLayer l{Matrix(out, in), std::vector<double>(out)};
  for (auto& v : l.weights.data()) v = r.f64("weights");
  for (auto& v : l.bias) v = r.f64("bias");
  return l;
}

}  // namespace

std::array<std::uint8_t, kEmbeddingHeaderSize> encode_header(const EmbeddingFileHeader& h) {
  std::array<std::uint8_t, kEmbeddingHeaderSize> b{};
  std::memcpy(b.data(), kEmbeddingMagic, 4);
  b[4] = static_cast<std::uint8_t>(h.version & 0xFF);
  b[5] = static_cast<std::uint8_t>(h.version >> 8);
  b[6] = static_cast<std::uint8_t>(h.kind);
  for (int i = 0; i < 4; ++i) b[7 + i] = static_cast<std::uint8_t>(h.count >> (8 * i));
  for (int i = 0; i < 4; ++i) b[11 + i] = static_cast<std::uint8_t>(h.dim >> (8 * i));
  return b;
}

void save_embeddings(const std::string& path, const Matrix& vectors) {
  Writer w;
  write_header(w, {kEmbeddingFormatVersion, EmbeddingKind::vectors,
                   checked_u32(vectors.rows(), "row count"), checked_u32(vectors.cols(), "dim")});
  for (const double v : vectors.data()) w.f32(v);
  w.write_to(path);
}

void save_sequences(const std::string& path, std::span<const TokenSequence> sequences) {
  const std::size_t d = sequences.empty() ? 0 : sequences.front().tokens.cols();
  Writer w;
  write_header(w, {kEmbeddingFormatVersion, EmbeddingKind::sequences,
                   checked_u32(sequences.size(), "sequence count"), checked_u32(d, "dim")});
  for (const auto& s : sequences) {
    if (s.tokens.cols() != d) throw Error(ErrorCode::shape_mismatch, "save_sequences: ragged token dims");
    if (s.mask.size() != s.tokens.rows()) throw Error(ErrorCode::shape_mismatch, "save_sequences: mask length");
    std::size_t len = 0;
    for (const bool m : s.mask) len += m ? 1 : 0;
    w.u32(checked_u32(len, "sequence length"));
    for (std::size_t t = 0; t < s.tokens.rows(); ++t) {
      if (!s.mask[t]) continue;
      for (const double v : s.tokens.row(t)) w.f32(v);
    }
  }
  w.write_to(path);
}

EmbeddingFile load_embeddings(const std::string& path) {
  Reader r(read_file(path), path);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kEmbeddingMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, "'" + path + "' is not an SDEC embedding file");
  }
  EmbeddingFile f;
  f.header.version = r.u16("version");
  if (f.header.version != kEmbeddingFormatVersion) {
    throw Error(ErrorCode::unsupported_version,
                "'" + path + "': unsupported version " + std::to_string(f.header.version));
  }
  const std::uint8_t kind = r.u8("kind");
  if (kind > 1) throw Error(ErrorCode::corrupt, "'" + path + "': unknown kind " + std::to_string(kind));
  f.header.kind = static_cast<EmbeddingKind>(kind);
  f.header.count = r.u32("count");
  f.header.dim = r.u32("dim");
  const std::uint64_t n = f.header.count;
  const std::uint64_t d = f.header.dim;

  if (f.header.kind == EmbeddingKind::vectors) {
    const std::uint64_t payload = n * d * 4;
    if (r.remaining() < payload) {
      throw Error(ErrorCode::truncated, "'" + path + "': payload shorter than n*d floats");
    }
    if (r.remaining() > payload) {
      throw Error(ErrorCode::corrupt, "'" + path + "': trailing bytes after payload");
    }
    f.vectors = Matrix(n, d);
    for (auto& v : f.vectors.data()) v = r.f32("payload");
  } else {
    f.sequences.reserve(std::min<std::uint64_t>(n, r.remaining() / 4));
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t len = r.u32("sequence length");
      if (len * d > r.remaining() / 4) {
        throw Error(ErrorCode::truncated, "'" + path + "': sequence " + std::to_string(i) + " truncated");
      }
      Matrix tokens(len, d);
      for (auto& v : tokens.data()) v = r.f32("tokens");
      f.sequences.push_back(TokenSequence::unmasked(std::move(tokens)));
    }
    if (r.remaining() != 0) {
      throw Error(ErrorCode::corrupt, "'" + path + "': trailing bytes after payload");
    }
  }
  return f;
}

Matrix load_vectors(const std::string& path) {
  auto f = load_embeddings(path);
  if (f.header.kind != EmbeddingKind::vectors) {
    throw Error(ErrorCode::invalid_argument, "'" + path + "' holds token sequences, expected vectors");
  }
  return std::move(f.vectors);
}

void save_checkpoint(const std::string& path, const AutoencoderParams& params,
                     const ClusterModel* model, std::uint64_t hash) {
  Writer w;
  w.bytes(kCheckpointMagic, 4);
  w.u16(kCheckpointFormatVersion);
  w.u64(hash);
  const auto dims = params.layer_dims();
  w.u32(checked_u32(dims.size(), "layer count"));
  for (const auto d : dims) w.u32(checked_u32(d, "layer width"));
  for (const auto& l : params.encoder) write_dense(w, l);
  for (const auto& l : params.decoder) write_dense(w, l);
  w.u8(model ? 1 : 0);
  if (model) {
    w.u32(checked_u32(model->k(), "k"));
    w.u32(checked_u32(model->centroids.cols(), "centroid dim"));
    w.f64(model->alpha);
    for (const double v : model->centroids.data()) w.f64(v);
  }
  w.write_to(path);
}

LoadedCheckpoint load_checkpoint(const std::string& path,
                                 std::optional<std::uint64_t> expected_hash) {
  Reader r(read_file(path), path);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, "'" + path + "' is not an SDEC checkpoint");
  }
  const auto version = r.u16("version");
  if (version != kCheckpointFormatVersion) {
    throw Error(ErrorCode::unsupported_version,
                "'" + path + "': unsupported checkpoint version " + std::to_string(version));
  }
  LoadedCheckpoint out;
  out.checkpoint.config_hash = r.u64("config hash");
  const std::uint32_t ndims = r.u32("layer count");
  if (ndims < 2) throw Error(ErrorCode::corrupt, "'" + path + "': fewer than two layer dims");
  if (ndims > r.remaining() / 4) throw Error(ErrorCode::truncated, "'" + path + "': layer dims truncated");
  std::vector<std::size_t> dims(ndims);
  for (auto& d : dims) {
    d = r.u32("layer width");
    if (d == 0) throw Error(ErrorCode::corrupt, "'" + path + "': zero layer width");
  }
  auto& p = out.checkpoint.params;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) p.encoder.push_back(read_dense(r, dims[i], dims[i + 1]));
  for (std::size_t i = dims.size() - 1; i > 0; --i) p.decoder.push_back(read_dense(r, dims[i], dims[i - 1]));

  const auto has_model = r.u8("model flag");
  if (has_model > 1) throw Error(ErrorCode::corrupt, "'" + path + "': bad model flag");
  if (has_model == 1) {
    const std::uint64_t k = r.u32("k");
    const std::uint64_t dz = r.u32("centroid dim");
    if (dz != dims.back()) throw Error(ErrorCode::corrupt, "'" + path + "': centroid dim != latent dim");
    ClusterModel m;
    m.alpha = r.f64("alpha");
    if (k == 0 || k * dz > r.remaining() / 8) {
      throw Error(ErrorCode::truncated, "'" + path + "': centroid payload truncated");
    }
    m.centroids = Matrix(k, dz);
    for (auto& v : m.centroids.data()) v = r.f64("centroids");
    out.checkpoint.model = std::move(m);
  }
  if (r.remaining() != 0) throw Error(ErrorCode::corrupt, "'" + path + "': trailing bytes");
  out.hash_mismatch = expected_hash.has_value() && *expected_hash != out.checkpoint.config_hash;
  return out;
}

Labels load_labels(const std::string& path, std::optional<std::size_t> k) {
  const auto lines = split_lines(read_text(path));
  Labels labels;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    long long v = 0;
    if (!parse_int(lines[i], v)) {
      if (i == 0) continue;  // header
      throw Error(ErrorCode::corrupt, "'" + path + "' line " + std::to_string(i + 1) +
                                          ": not an integer label");
    }
    if (v < 0 || v > INT32_MAX || (k && static_cast<std::size_t>(v) >= *k)) {
      throw Error(ErrorCode::label_range, "'" + path + "' line " + std::to_string(i + 1) +
                                              ": label " + lines[i] + " out of range");
    }
    labels.push_back(static_cast<std::int32_t>(v));
  }
  return labels;
}

void save_labels(const std::string& path, const Labels& labels) {
  std::string text;
  text.reserve(labels.size() * 3);
  for (const auto l : labels) {
    text += std::to_string(l);
    text += '\n';
  }
  write_text(path, text);
}

void save_history(const std::string& path, std::span<const HistoryEntry> history) {
  std::string text = "iteration,kl,recon,delta_label\n";
  for (const auto& h : history) {
    text += std::to_string(h.iteration) + "," + format_double(h.kl) + "," +
            format_double(h.recon) + "," + format_double(h.delta_label) + "\n";
  }
  write_text(path, text);
}

std::vector<HistoryEntry> load_history(const std::string& path) {
  const auto lines = split_lines(read_text(path));
  std::vector<HistoryEntry> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    HistoryEntry h;
    unsigned long long it = 0;
    char kl[64], recon[64], delta[64];
    if (std::sscanf(lines[i].c_str(), "%llu,%63[^,],%63[^,],%63s", &it, kl, recon, delta) != 4) {
      throw Error(ErrorCode::corrupt, "'" + path + "' line " + std::to_string(i + 1) + ": bad history row");
    }
    h.iteration = it;
    h.kl = std::strtod(kl, nullptr);
    h.recon = std::strtod(recon, nullptr);
    h.delta_label = std::strtod(delta, nullptr);
    out.push_back(h);
  }
  return out;
}

void save_refine_log(const std::string& path, std::span<const Reassignment> log) {
  std::string text = "pass,index,old_label,new_label,margin\n";
  for (const auto& e : log) {
    text += std::to_string(e.pass) + "," + std::to_string(e.index) + "," +
            std::to_string(e.old_label) + "," + std::to_string(e.new_label) + "," +
            format_double(e.margin) + "\n";
  }
  write_text(path, text);
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["acc"] = report.acc;
  j["nmi"] = report.nmi;
  j["ari"] = report.ari;
  j["mapping"] = report.mapping;
  return j.dump();
}

}  // namespace sdec
