#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "sparseatt/brute_force.hpp"
#include "sparseatt/instance.hpp"
#include "sparseatt/rng.hpp"

using namespace sparseatt;

TEST_CASE("threshold keeps exactly the clearing scores") {
  DenseMatrix q(1, 3, {3.0, -0.5, 5.0});
  DenseMatrix k_mat = DenseMatrix::identity(3);
  QueryCostLedger ledger;
  SupportSets support = brute_force_support(q, k_mat, 2.0, ledger);
  CHECK(support.rows[0] == std::vector<std::size_t>{0, 2});
  CHECK(support.scores[0] == std::vector<double>{3.0, 5.0});
  CHECK(support.tau == 2.0);
}

TEST_CASE("zero scores give empty supports") {
  DenseMatrix zero(4, 2);
  QueryCostLedger ledger;
  SupportSets support = brute_force_support(zero, zero, 1.0, ledger);
  for (const auto& row : support.rows) CHECK(row.empty());
}

TEST_CASE("ledger charges exactly n^2 oracle calls") {
  DenseMatrix q(6, 3);
  DenseMatrix k_mat(5, 3);
  QueryCostLedger ledger;
  brute_force_support(q, k_mat, 1.0, ledger);
  CHECK(ledger.oracle_calls == 30);
  CHECK(ledger.dot_product_flops == 30 * 3);
}

TEST_CASE("generated instance supports match the truth and respect k") {
  InstanceSpec spec;
  spec.n = 24;
  spec.k = 3;
  spec.tau = 2.0 * std::log(24.0);
  spec.eta = 0.02;
  spec.seed = 5;
  Instance inst = generate(spec);
  QueryCostLedger ledger;
  SupportSets support = brute_force_support(inst.q, inst.k_mat, spec.tau, ledger);
  CHECK(support == inst.truth);
  CHECK(support.max_row_size() <= spec.k);
  for (std::size_t i = 0; i < support.rows.size(); ++i)
    for (double s : support.scores[i]) CHECK(s >= spec.tau);
}

TEST_CASE("support equals filtering the dense score matrix") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    DenseMatrix q(7, 3), k_mat(7, 3);
    for (std::size_t i = 0; i < 7; ++i) {
      SplitMix64 rq = stream_for(seed, StreamTag::kQueryMarkers, i);
      SplitMix64 rk = stream_for(seed, StreamTag::kKeyNoise, i);
      for (std::size_t c = 0; c < 3; ++c) {
        q(i, c) = rq.uniform(-2.0, 2.0);
        k_mat(i, c) = rk.uniform(-2.0, 2.0);
      }
    }
    double tau = 0.4;
    QueryCostLedger ledger;
    SupportSets support = brute_force_support(q, k_mat, tau, ledger);
    DenseMatrix scores = matmul(q, k_mat);
    for (std::size_t i = 0; i < 7; ++i) {
      std::vector<std::size_t> expected_idx;
      std::vector<double> expected_scores;
      for (std::size_t j = 0; j < 7; ++j) {
        if (scores(i, j) >= tau) {
          expected_idx.push_back(j);
          expected_scores.push_back(scores(i, j));
        }
      }
      CHECK(support.rows[i] == expected_idx);
      CHECK(support.scores[i] == expected_scores);  // bitwise via the shared dot
    }
  }
}

TEST_CASE("row_score_oracle meters and matches matmul entries") {
  DenseMatrix q(2, 2, {1.0, 0.0, 0.25, -0.5});
  DenseMatrix k_mat(2, 2, {1.0, 0.0, 0.0, 1.0});
  QueryCostLedger ledger;
  CHECK(row_score_oracle(q, k_mat, 0, 0, ledger) == 1.0);
  CHECK(row_score_oracle(q, k_mat, 0, 1, ledger) == 0.0);
  DenseMatrix scores = matmul(q, k_mat);
  CHECK(row_score_oracle(q, k_mat, 1, 1, ledger) == scores(1, 1));
  CHECK(ledger.oracle_calls == 3);
  CHECK(ledger.dot_product_flops == 6);
  CHECK_THROWS_AS(row_score_oracle(q, k_mat, 2, 0, ledger), std::out_of_range);
  CHECK_THROWS_AS(row_score_oracle(q, k_mat, 0, 2, ledger), std::out_of_range);
}

TEST_CASE("ledger merge is fieldwise") {
  QueryCostLedger a{1, 2, 3, 4}, b{10, 20, 30, 40};
  QueryCostLedger c = a + b;
  CHECK(c == QueryCostLedger{11, 22, 33, 44});
  a += b;
  CHECK(a == c);
}
