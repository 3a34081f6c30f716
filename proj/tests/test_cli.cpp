#include "doctest.h"

#include <cmath>
#include <string>

#include "subprocess.hpp"

#include "sparseatt/instance.hpp"

namespace {

const std::string kCli = SPARSEATT_CLI_PATH;

std::string q(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

TEST_CASE("generate writes a loadable instance and reports goodness") {
  testutil::TempDir dir;
  std::string out = dir.file("inst.bin");
  auto result = testutil::run_command(kCli + " generate --n 256 --k 4 --eta 0.01 --seed 7 --out " +
                                      q(out));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("\"is_good\":true") != std::string::npos);
  CHECK(testutil::read_file(out).size() > 0);
}

TEST_CASE("generate rejects invalid specs with exit code 1") {
  testutil::TempDir dir;
  auto tiny = testutil::run_command(kCli + " generate --n 1 --out " + q(dir.file("a.bin")));
  CHECK(tiny.exit_code == 1);
  auto low_tau = testutil::run_command(kCli + " generate --n 256 --tau 0.1 --out " +
                                       q(dir.file("b.bin")));
  CHECK(low_tau.exit_code == 1);
  auto bad_mode = testutil::run_command(kCli + " generate --n 16 --mode nope --out " +
                                        q(dir.file("c.bin")));
  CHECK(bad_mode.exit_code == 1);
}

TEST_CASE("run executes every method and repeats deterministically") {
  testutil::TempDir dir;
  std::string inst = dir.file("inst.bin");
  REQUIRE(testutil::run_command(kCli + " generate --n 64 --k 4 --eta 0.01 --seed 3 --out " +
                                q(inst))
              .exit_code == 0);

  auto exact = testutil::run_command(kCli + " run " + q(inst) + " --method exact");
  CHECK(exact.exit_code == 0);
  CHECK(exact.output.find("output_checksum") != std::string::npos);

  auto hsr_a = testutil::run_command(kCli + " run " + q(inst) + " --method hsr");
  auto hsr_b = testutil::run_command(kCli + " run " + q(inst) + " --method hsr");
  CHECK(hsr_a.exit_code == 0);
  auto checksum_of = [](const std::string& text) {
    auto pos = text.find("output_checksum");
    return text.substr(pos, 40);
  };
  CHECK(checksum_of(hsr_a.output) == checksum_of(hsr_b.output));
  CHECK(hsr_a.output.find("\"support_match\":true") != std::string::npos);

  auto sampled = testutil::run_command(kCli + " run " + q(inst) +
                                       " --method grover-sampled --seed 5");
  CHECK(sampled.exit_code == 0);

  auto unknown = testutil::run_command(kCli + " run " + q(inst) + " --method warp");
  CHECK(unknown.exit_code == 1);
}

TEST_CASE("verify passes a generated instance") {
  testutil::TempDir dir;
  std::string inst = dir.file("inst.bin");
  REQUIRE(testutil::run_command(kCli + " generate --n 64 --k 4 --eta 0.01 --seed 9 --out " +
                                q(inst))
              .exit_code == 0);
  auto verify = testutil::run_command(kCli + " verify " + q(inst));
  CHECK(verify.exit_code == 0);
  CHECK(verify.output.find("VERIFY PASS") != std::string::npos);
  CHECK(verify.output.find("normalized_gap_no_v") != std::string::npos);
}

TEST_CASE("bench emits versioned CSV with a summary block") {
  auto bench = testutil::run_command(
      kCli + " bench --grid \"n=64,128;k=4;d=8\" --method brute --method sparse --repeats 2");
  CHECK(bench.exit_code == 0);
  CHECK(bench.output.find("# bench-csv-v1") != std::string::npos);
  CHECK(bench.output.find("n,k,d,method,seed,oracle_calls,flops,wall_ms,support_match") !=
        std::string::npos);
  CHECK(bench.output.find("# summary method=brute") != std::string::npos);
  CHECK(bench.output.find("# summary method=sparse") != std::string::npos);
  int rows = 0;
  size_t pos = 0;
  while ((pos = bench.output.find("\n64,", pos)) != std::string::npos) {
    ++rows;
    ++pos;
  }
  CHECK(rows == 4);  // 2 methods x 2 repeats at n=64

  auto bad = testutil::run_command(kCli + " bench --grid \"m=4\"");
  CHECK(bad.exit_code == 1);
}

TEST_CASE("usage errors exit with code 1") {
  auto no_sub = testutil::run_command(kCli);
  CHECK(no_sub.exit_code == 1);
  auto missing_flag = testutil::run_command(kCli + " generate");
  CHECK(missing_flag.exit_code == 1);
}

TEST_CASE("results are identical across thread counts") {
  testutil::TempDir dir;
  std::string inst = dir.file("inst.bin");
  REQUIRE(testutil::run_command(kCli + " generate --n 96 --k 4 --eta 0.01 --seed 13 --out " +
                                q(inst))
              .exit_code == 0);
  for (const std::string method : {"exact", "brute", "grover-sampled"}) {
    std::string base = " run " + q(inst) + " --method " + method + " --seed 2";
    auto one = testutil::run_command("SPARSEATT_THREADS=1 " + kCli + base);
    auto four = testutil::run_command("SPARSEATT_THREADS=4 " + kCli + base);
    REQUIRE(one.exit_code == 0);
    REQUIRE(four.exit_code == 0);
    auto strip_wall = [](std::string text) {
      auto pos = text.find("\"wall_ms\":");
      if (pos != std::string::npos) {
        auto end = text.find_first_of(",}", pos);
        text.erase(pos, end - pos);
      }
      return text;
    };
    CHECK(strip_wall(one.output) == strip_wall(four.output));
  }
}

TEST_CASE("run omits dense error fields above the materialization guard") {
  testutil::TempDir dir;
  std::string inst = dir.file("big.bin");
  auto gen = testutil::run_command(
      kCli + " generate --n 16500 --d 8 --k 4 --eta 0.01 --seed 1 --mode random_embed --out " +
      q(inst));
  REQUIRE(gen.exit_code == 0);
  auto run = testutil::run_command(kCli + " run " + q(inst) + " --method sparse");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("\"error\"") == std::string::npos);
  CHECK(run.output.find("dense comparison skipped") != std::string::npos);
}

TEST_CASE("verify refuses a goodness-violating instance with exit code 2") {
  testutil::TempDir dir;
  sparseatt::InstanceSpec spec;
  spec.n = 32;
  spec.k = 4;
  spec.tau = 2.0 * std::log(32.0);
  spec.eta = 0.01;
  spec.seed = 8;
  sparseatt::Instance inst = sparseatt::generate(spec);
  // Push one off-support score below -eta.
  bool patched = false;
  for (std::size_t j = 0; j < 32 && !patched; ++j) {
    if (inst.q(0, j) <= 0.0) {
      inst.q(0, j) = -2.0 * spec.eta;
      patched = true;
    }
  }
  REQUIRE(patched);
  std::string path = dir.file("bad.bin");
  sparseatt::write_instance(path, inst);
  auto verify = testutil::run_command(kCli + " verify " + q(path));
  CHECK(verify.exit_code == 2);
  CHECK(verify.output.find("off-support") != std::string::npos);
}
