#include "sparseatt/instance.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sparseatt/goodness.hpp"
#include "sparseatt/rng.hpp"

namespace sparseatt {

std::string mode_name(InstanceMode mode) {
  return mode == InstanceMode::kGramExact ? "gram_exact" : "random_embed";
}

InstanceMode mode_from_name(const std::string& name) {
  if (name == "gram_exact") return InstanceMode::kGramExact;
  if (name == "random_embed") return InstanceMode::kRandomEmbed;
  throw std::invalid_argument("unknown instance mode '" + name + "'");
}

void InstanceSpec::validate() const {
  if (n < 2) throw std::invalid_argument("InstanceSpec: n must be >= 2");
  if (k < 1 || k > n) throw std::invalid_argument("InstanceSpec: k must lie in [1, n]");
  if (!(eta >= 0.0)) throw std::invalid_argument("InstanceSpec: eta must be >= 0");
  double tau_floor = 2.0 * std::log(static_cast<double>(n));
  if (!(tau >= tau_floor)) {
    throw std::invalid_argument("InstanceSpec: tau must be >= 2 ln n (= " +
                                std::to_string(tau_floor) + ")");
  }
  if (mode == InstanceMode::kRandomEmbed && d < 2) {
    throw std::invalid_argument("InstanceSpec: random_embed needs d >= 2");
  }
  if (!(effective_v_cap() >= 0.0)) {
    throw std::invalid_argument("InstanceSpec: v_inf_cap must be >= 0");
  }
}

namespace {

DenseMatrix draw_value_matrix(std::size_t n, std::size_t d, double cap, std::uint64_t seed) {
  DenseMatrix v(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = stream_for(seed, StreamTag::kValueMatrix, i);
    for (std::size_t c = 0; c < d; ++c) v(i, c) = rng.uniform(-cap, cap);
  }
  return v;
}

Instance generate_gram_exact(const InstanceSpec& spec) {
  const std::size_t n = spec.n;
  Instance inst;
  inst.spec = spec;
  inst.spec.d = n;  // Q holds the score matrix itself, K is the identity
  inst.spec.v_inf_cap = spec.effective_v_cap();

  inst.q = DenseMatrix(n, n);
  inst.truth.n = n;
  inst.truth.tau = spec.tau;
  inst.truth.rows.resize(n);
  inst.truth.scores.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 pos_rng = stream_for(spec.seed, StreamTag::kSupportPositions, i);
    std::size_t m = 1 + static_cast<std::size_t>(pos_rng.uniform_int(spec.k));
    std::vector<std::size_t> positions = sample_distinct(pos_rng, m, n);

    SplitMix64 on_rng = stream_for(spec.seed, StreamTag::kOnSupportScores, i);
    SplitMix64 off_rng = stream_for(spec.seed, StreamTag::kOffSupportScores, i);
    std::size_t next = 0;
    auto& truth_scores = inst.truth.scores[i];
    truth_scores.reserve(m);
    for (std::size_t j = 0; j < n; ++j) {
      if (next < positions.size() && positions[next] == j) {
        double score = on_rng.uniform(spec.tau, spec.tau + 1.0);
        inst.q(i, j) = score;
        truth_scores.push_back(score);
        ++next;
      } else {
        inst.q(i, j) = off_rng.uniform(-spec.eta, 0.0);
      }
    }
    inst.truth.rows[i] = std::move(positions);
  }

  inst.k_mat = DenseMatrix::identity(n);
  inst.v = draw_value_matrix(n, n, inst.spec.v_inf_cap, spec.seed);
  return inst;
}

// Planted-marker embedding: d-1 marker coordinates plus one bias coordinate.
// Each key carries small noise and a bias of 1; "special" keys additionally
// sit on a marker axis. Each query aims at one marker group with weight
// tau' = tau + eta and a bias of -eta/2, which pins on-support scores inside
// [tau + eta/4, tau + 3 eta/4] and every other score inside
// [-3 eta/4, -eta/4]. Noise amplitudes are solved from those margins.
Instance generate_random_embed_attempt(const InstanceSpec& spec, std::uint64_t attempt_seed) {
  const std::size_t n = spec.n;
  const std::size_t d = spec.d;
  const std::size_t marker_dims = d - 1;
  const std::size_t bias = d - 1;

  std::size_t groups = std::min(marker_dims, std::max<std::size_t>(1, n / (2 * spec.k)));
  std::vector<std::size_t> group_sizes(groups);
  std::size_t total_special = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    group_sizes[g] = 1 + (g % spec.k);
    total_special += group_sizes[g];
  }

  const double tau_prime = spec.tau + spec.eta;
  const double alpha = spec.eta / 8.0;
  const double beta =
      (spec.eta / 8.0) / (tau_prime + static_cast<double>(marker_dims) * alpha);

  SplitMix64 layout_rng = stream_for(attempt_seed, StreamTag::kGroupLayout, 0);
  std::vector<std::size_t> special = sample_distinct(layout_rng, total_special, n);
  std::vector<std::vector<std::size_t>> group_members(groups);
  std::vector<std::ptrdiff_t> marker_of_key(n, -1);
  {
    std::size_t offset = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      group_members[g].assign(special.begin() + offset, special.begin() + offset + group_sizes[g]);
      for (std::size_t key : group_members[g]) marker_of_key[key] = static_cast<std::ptrdiff_t>(g);
      offset += group_sizes[g];
    }
  }

  Instance inst;
  inst.spec = spec;
  inst.spec.v_inf_cap = spec.effective_v_cap();

  inst.k_mat = DenseMatrix(n, d);
  for (std::size_t j = 0; j < n; ++j) {
    SplitMix64 rng = stream_for(attempt_seed, StreamTag::kKeyNoise, j);
    for (std::size_t c = 0; c < marker_dims; ++c) inst.k_mat(j, c) = rng.uniform(-beta, beta);
    inst.k_mat(j, bias) = 1.0;
    if (marker_of_key[j] >= 0) {
      inst.k_mat(j, static_cast<std::size_t>(marker_of_key[j])) += 1.0;
    }
  }

  inst.q = DenseMatrix(n, d);
  std::vector<std::size_t> query_group(n);
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = stream_for(attempt_seed, StreamTag::kQueryMarkers, i);
    std::size_t g = static_cast<std::size_t>(rng.uniform_int(groups));
    query_group[i] = g;
    for (std::size_t c = 0; c < marker_dims; ++c) inst.q(i, c) = rng.uniform(-alpha, alpha);
    inst.q(i, g) += tau_prime;
    inst.q(i, bias) = -spec.eta / 2.0;
  }

  inst.truth.n = n;
  inst.truth.tau = spec.tau;
  inst.truth.rows.resize(n);
  inst.truth.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.truth.rows[i] = group_members[query_group[i]];
    auto& scores = inst.truth.scores[i];
    scores.reserve(inst.truth.rows[i].size());
    for (std::size_t j : inst.truth.rows[i]) {
      scores.push_back(dot(inst.q.row(i), inst.k_mat.row(j)));
    }
  }

  inst.v = draw_value_matrix(n, d, inst.spec.v_inf_cap, attempt_seed);
  return inst;
}

}  // namespace

Instance generate(const InstanceSpec& spec) {
  spec.validate();

  if (spec.mode == InstanceMode::kGramExact) {
    Instance inst = generate_gram_exact(spec);
    GoodnessReport report =
        check_goodness(inst.q, inst.k_mat, spec.tau, spec.k, spec.eta);
    if (!report.is_good) {
      throw std::runtime_error("generate: gram_exact instance failed the goodness check");
    }
    return inst;
  }

  std::string diagnostics;
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    std::uint64_t attempt_seed =
        attempt == 0 ? spec.seed : derive_seed(spec.seed, StreamTag::kRetry, attempt);
    Instance inst = generate_random_embed_attempt(spec, attempt_seed);
    GoodnessReport report =
        check_goodness(inst.q, inst.k_mat, spec.tau, spec.k, spec.eta);
    if (report.is_good) return inst;
    diagnostics = "max_row_support=" + std::to_string(report.max_row_support) +
                  " max_off=" + std::to_string(report.max_off_support_score) +
                  " min_off=" + std::to_string(report.min_off_support_score);
  }
  throw std::runtime_error("generate: random_embed failed validation after 16 attempts (" +
                           diagnostics + ")");
}

// ---------------------------------------------------------------------------
// Container format, version 1.
//
//   bytes 0..7   magic "ATTNINST"
//   u32 LE       header length
//   header       JSON: format_version + the resolved spec
//   3 blocks     Q, K, V: u64 rows, u64 cols, rows*cols f64, all LE
//   truth        u64 row count; per row varint count, varint index deltas,
//                then count f64 scores
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'T', 'T', 'N', 'I', 'N', 'S', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_f64(std::string& out, double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  put_u64(out, bits);
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

class Reader {
 public:
  Reader(const std::string& buffer, std::string path)
      : buffer_(buffer), path_(std::move(path)) {}

  const char* take(std::size_t count) {
    if (pos_ + count > buffer_.size()) fail("truncated file");
    const char* p = buffer_.data() + pos_;
    pos_ += count;
    return p;
  }

  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(p[b]);
    return v;
  }

  std::uint64_t u64() {
    const char* p = take(8);
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(p[b]);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (shift > 63) fail("varint overflow");
      auto byte = static_cast<unsigned char>(*take(1));
      v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
      if ((byte & 0x80) == 0) break;
      shift += 7;
    }
    return v;
  }

  bool exhausted() const { return pos_ == buffer_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("read_instance: " + what + " in '" + path_ + "'");
  }

 private:
  const std::string& buffer_;
  std::string path_;
  std::size_t pos_ = 0;
};

void put_matrix(std::string& out, const DenseMatrix& m) {
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (double x : m.data()) put_f64(out, x);
}

DenseMatrix take_matrix(Reader& reader) {
  std::uint64_t rows = reader.u64();
  std::uint64_t cols = reader.u64();
  if (rows == 0 || cols == 0 || rows > (std::uint64_t{1} << 32) ||
      cols > (std::uint64_t{1} << 32)) {
    reader.fail("implausible matrix shape");
  }
  std::vector<double> data(rows * cols);
  for (double& x : data) x = reader.f64();
  return DenseMatrix(rows, cols, std::move(data));
}

nlohmann::json spec_to_json(const InstanceSpec& spec) {
  return nlohmann::json{
      {"format_version", kFormatVersion},
      {"n", spec.n},
      {"d", spec.d},
      {"k", spec.k},
      {"tau", spec.tau},
      {"eta", spec.eta},
      {"seed", spec.seed},
      {"mode", mode_name(spec.mode)},
      {"v_inf_cap", spec.v_inf_cap},
  };
}

InstanceSpec spec_from_json(const nlohmann::json& j) {
  InstanceSpec spec;
  spec.n = j.at("n").get<std::size_t>();
  spec.d = j.at("d").get<std::size_t>();
  spec.k = j.at("k").get<std::size_t>();
  spec.tau = j.at("tau").get<double>();
  spec.eta = j.at("eta").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.mode = mode_from_name(j.at("mode").get<std::string>());
  spec.v_inf_cap = j.at("v_inf_cap").get<double>();
  return spec;
}

}  // namespace

void write_instance(const std::string& path, const Instance& instance) {
  std::string body;
  body.reserve(64 + 8 * (instance.q.data().size() + instance.k_mat.data().size() +
                         instance.v.data().size()));
  body.append(kMagic, sizeof(kMagic));

  std::string header = spec_to_json(instance.spec).dump();
  put_u32(body, static_cast<std::uint32_t>(header.size()));
  body.append(header);

  put_matrix(body, instance.q);
  put_matrix(body, instance.k_mat);
  put_matrix(body, instance.v);

  put_u64(body, instance.truth.rows.size());
  put_f64(body, instance.truth.tau);
  for (std::size_t i = 0; i < instance.truth.rows.size(); ++i) {
    const auto& idx = instance.truth.rows[i];
    put_varint(body, idx.size());
    std::size_t prev = 0;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      put_varint(body, idx[t] - prev);
      prev = idx[t];
    }
    for (double s : instance.truth.scores[i]) put_f64(body, s);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_instance: cannot open '" + path + "'");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("write_instance: short write to '" + path + "'");
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_instance: cannot open '" + path + "'");
  std::string buffer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader reader(buffer, path);

  const char* magic = reader.take(sizeof(kMagic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) reader.fail("bad magic");

  std::uint32_t header_len = reader.u32();
  std::string header(reader.take(header_len), header_len);
  nlohmann::json j = nlohmann::json::parse(header, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) reader.fail("unparseable header");
  if (j.at("format_version").get<std::uint32_t>() != kFormatVersion) {
    reader.fail("unsupported format version");
  }

  Instance inst;
  inst.spec = spec_from_json(j);
  inst.q = take_matrix(reader);
  inst.k_mat = take_matrix(reader);
  inst.v = take_matrix(reader);

  std::uint64_t truth_rows = reader.u64();
  inst.truth.n = inst.k_mat.rows();
  inst.truth.tau = reader.f64();
  inst.truth.rows.resize(truth_rows);
  inst.truth.scores.resize(truth_rows);
  for (std::uint64_t i = 0; i < truth_rows; ++i) {
    std::uint64_t count = reader.varint();
    auto& idx = inst.truth.rows[i];
    idx.resize(count);
    std::size_t prev = 0;
    for (std::uint64_t t = 0; t < count; ++t) {
      prev += static_cast<std::size_t>(reader.varint());
      idx[t] = prev;
    }
    auto& scores = inst.truth.scores[i];
    scores.resize(count);
    for (std::uint64_t t = 0; t < count; ++t) scores[t] = reader.f64();
  }
  if (!reader.exhausted()) reader.fail("trailing bytes");

  inst.truth.validate();
  return inst;
}

}  // namespace sparseatt
