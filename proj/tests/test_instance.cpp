#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <fstream>

#include "subprocess.hpp"

#include "sparseatt/brute_force.hpp"
#include "sparseatt/goodness.hpp"
#include "sparseatt/instance.hpp"

using namespace sparseatt;

namespace {

InstanceSpec small_spec(std::uint64_t seed) {
  InstanceSpec spec;
  spec.n = 16;
  spec.k = 2;
  spec.tau = 2.0 * std::log(16.0);
  spec.eta = 0.05;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("spec invariants are enforced") {
  InstanceSpec spec = small_spec(1);
  spec.n = 1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec(1);
  spec.tau = 0.1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec(1);
  spec.k = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec(1);
  spec.k = 17;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec(1);
  spec.eta = -0.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec(1);
  spec.mode = InstanceMode::kRandomEmbed;
  spec.d = 1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("generation is deterministic") {
  Instance a = generate(small_spec(42));
  Instance b = generate(small_spec(42));
  CHECK(a.q == b.q);
  CHECK(a.k_mat == b.k_mat);
  CHECK(a.v == b.v);
  CHECK(a.truth == b.truth);
  Instance c = generate(small_spec(43));
  CHECK(a.q != c.q);
}

TEST_CASE("gram_exact places the score matrix exactly") {
  Instance inst = generate(small_spec(42));
  CHECK(inst.spec.d == 16);  // d := n
  CHECK(inst.k_mat == DenseMatrix::identity(16));
  GoodnessReport report =
      check_goodness(inst.q, inst.k_mat, inst.spec.tau, inst.spec.k, inst.spec.eta);
  CHECK(report.is_good);
  CHECK(inst.truth.max_row_size() <= 2);
  for (const auto& row : inst.truth.rows) CHECK(row.size() >= 1);

  QueryCostLedger ledger;
  SupportSets brute = brute_force_support(inst.q, inst.k_mat, inst.spec.tau, ledger);
  CHECK(brute == inst.truth);
}

TEST_CASE("eta zero gram_exact has exactly zero off-support scores") {
  InstanceSpec spec = small_spec(7);
  spec.n = 8;
  spec.k = 1;
  spec.tau = 2.0 * std::log(8.0);
  spec.eta = 0.0;
  Instance inst = generate(spec);
  for (std::size_t i = 0; i < 8; ++i) {
    std::size_t on = 0;
    for (std::size_t j = 0; j < 8; ++j) {
      if (inst.q(i, j) >= spec.tau) {
        ++on;
      } else {
        CHECK(inst.q(i, j) == 0.0);
      }
    }
    CHECK(on == 1);
  }
}

TEST_CASE("random_embed instances are good with the requested dimension") {
  InstanceSpec spec;
  spec.n = 128;
  spec.d = 12;
  spec.k = 6;
  spec.tau = 2.0 * std::log(128.0);
  spec.eta = 0.03;
  spec.seed = 5;
  spec.mode = InstanceMode::kRandomEmbed;
  Instance inst = generate(spec);
  CHECK(inst.q.cols() == 12);
  CHECK(inst.k_mat.rows() == 128);
  GoodnessReport report = check_goodness(inst.q, inst.k_mat, spec.tau, spec.k, spec.eta);
  CHECK(report.is_good);
  QueryCostLedger ledger;
  CHECK(brute_force_support(inst.q, inst.k_mat, spec.tau, ledger) == inst.truth);
  for (const auto& row : inst.truth.rows) {
    CHECK(row.size() >= 1);
    CHECK(row.size() <= spec.k);
  }
}

TEST_CASE("container round-trips bit-exactly") {
  testutil::TempDir dir;
  Instance inst = generate(small_spec(42));
  std::string path_a = dir.file("a.bin");
  std::string path_b = dir.file("b.bin");
  write_instance(path_a, inst);
  Instance loaded = read_instance(path_a);
  CHECK(loaded.q == inst.q);
  CHECK(loaded.k_mat == inst.k_mat);
  CHECK(loaded.v == inst.v);
  CHECK(loaded.truth == inst.truth);
  CHECK(loaded.spec.n == inst.spec.n);
  CHECK(loaded.spec.tau == inst.spec.tau);
  CHECK(loaded.spec.v_inf_cap == inst.spec.v_inf_cap);
  CHECK(mode_name(loaded.spec.mode) == mode_name(inst.spec.mode));
  write_instance(path_b, loaded);
  CHECK(testutil::read_file(path_a) == testutil::read_file(path_b));
}

TEST_CASE("corrupted containers are rejected") {
  testutil::TempDir dir;
  Instance inst = generate(small_spec(3));
  std::string path = dir.file("inst.bin");
  write_instance(path, inst);

  std::string bytes = testutil::read_file(path);
  bytes[0] = 'X';
  std::string bad_magic = dir.file("bad_magic.bin");
  std::ofstream(bad_magic, std::ios::binary).write(bytes.data(), bytes.size());
  CHECK_THROWS_AS(read_instance(bad_magic), std::runtime_error);

  std::string truncated = dir.file("trunc.bin");
  std::string cut = testutil::read_file(path).substr(0, 64);
  std::ofstream(truncated, std::ios::binary).write(cut.data(), cut.size());
  CHECK_THROWS_AS(read_instance(truncated), std::runtime_error);

  CHECK_THROWS_AS(read_instance(dir.file("missing.bin")), std::runtime_error);
}

TEST_CASE("v_inf_cap defaults to eta and is honored") {
  InstanceSpec spec = small_spec(11);
  Instance inst = generate(spec);
  CHECK(inst.spec.v_inf_cap == spec.eta);
  double v_inf = 0.0;
  for (double x : inst.v.data()) v_inf = std::max(v_inf, std::fabs(x));
  CHECK(v_inf <= spec.eta);

  spec.v_inf_cap = 0.5;
  Instance wide = generate(spec);
  CHECK(wide.spec.v_inf_cap == 0.5);
}
