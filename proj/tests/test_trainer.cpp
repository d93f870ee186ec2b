#include "idl/coherence.hpp"
#include "idl/errors.hpp"
#include "idl/idl_update.hpp"
#include "idl/synthetic.hpp"
#include "idl/trainer.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace idl;

namespace {

bool same_history(const TrainHistory& a, const TrainHistory& b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_outcome(a[i], b[i]))
      return false;
  return true;
}

TrainConfig short_config(int iterations) {
  TrainConfig c;
  c.iterations = iterations;
  c.seed = 11;
  return c;
}

} // namespace

TEST_CASE("init_dictionary samples normalized data columns") {
  std::mt19937_64 rng(1);
  const DataMatrix data(testing::random_matrix(5, 12, rng));

  const Dictionary a = init_dictionary(data, 12, 42);
  CHECK(a == init_dictionary(data, 12, 42));
  CHECK_FALSE(a == init_dictionary(data, 12, 43));

  // L = N gives a permutation of the normalized columns.
  std::set<Index> hit;
  for (Index l = 0; l < 12; ++l) {
    for (Index n = 0; n < 12; ++n) {
      if ((a.atom(l) - data.column(n).normalized()).norm() < 1e-15)
        hit.insert(n);
    }
  }
  CHECK(hit.size() == 12);

  // More atoms than columns repeats columns.
  const Dictionary big = init_dictionary(data, 30, 5);
  CHECK(big.size() == 30);

  // Zero columns are never drawn.
  Matrix holes = data.columns();
  holes.col(3).setZero();
  const Dictionary skip = init_dictionary(DataMatrix(holes), 11, 9);
  for (Index l = 0; l < 11; ++l)
    CHECK(skip.atom(l).allFinite());

  CHECK_THROWS_AS(init_dictionary(DataMatrix(Matrix::Zero(4, 3)), 2, 0), ValidationError);
  CHECK_THROWS_AS(init_dictionary(data, 0, 0), ValidationError);
}

TEST_CASE("orthonormal data is a fixed point") {
  std::mt19937_64 rng(2);
  const Eigen::HouseholderQR<Matrix> qr(testing::random_matrix(6, 6, rng));
  const Matrix q = qr.householderQ() * Matrix::Identity(6, 6);
  const DataMatrix data(q);
  const TrainResult r = train(data, Dictionary(q), short_config(1), IdlMethod{0.0});
  REQUIRE(r.history.size() == 1);
  CHECK(r.history[0].approx_error < 1e-24);
  CHECK((r.dictionary.atoms() - q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("training is deterministic") {
  const SyntheticData syn = make_synthetic(8, 16, 2, 200, 0.01, 3);
  const std::vector<Method> methods{IdlMethod{10.0}, KsvdReplaceMethod{0.5}, KsvdInksvdMethod{0.5, 100000}};
  for (const Method& m : methods) {
    const TrainResult a = train(syn.data, 16, short_config(4), m);
    const TrainResult b = train(syn.data, 16, short_config(4), m);
    CHECK(same_history(a.history, b.history));
    CHECK(a.dictionary == b.dictionary);
    CHECK(a.coding == b.coding);
    CHECK(a.history.size() == 4);
  }
}

TEST_CASE("idl dictionary step never increases the penalized objective") {
  const SyntheticData syn = make_synthetic(8, 20, 3, 300, 0.05, 4);
  for (double gamma : {0.0, 1.0, 50.0}) {
    const TrainResult r = train(syn.data, 20, short_config(6), IdlMethod{gamma});
    for (const IterationRecord& rec : r.history)
      CHECK(rec.update_objective_after <= rec.update_objective_before);
  }
}

TEST_CASE("ink-svd training honours the coherence threshold") {
  const SyntheticData syn = make_synthetic(8, 16, 2, 300, 0.05, 5);
  const TrainResult r = train(syn.data, 16, short_config(5), KsvdInksvdMethod{0.6, 100000});
  for (const IterationRecord& rec : r.history) {
    REQUIRE(rec.decorrelation.has_value());
    if (rec.decorrelation->converged)
      CHECK(rec.mutual_coherence <= 0.6 + 1e-9);
  }
}

TEST_CASE("history records are finite and complete") {
  const SyntheticData syn = make_synthetic(6, 10, 2, 100, 0.01, 6);
  TrainConfig c = short_config(3);
  c.coder = CoderKind::Omp;
  c.coder_param = 2;
  const TrainResult r = train(syn.data, 10, c, KsvdReplaceMethod{0.9});
  REQUIRE(r.history.size() == 3);
  for (const IterationRecord& rec : r.history) {
    CHECK(std::isfinite(rec.approx_error));
    CHECK(std::isfinite(rec.penalized_objective));
    CHECK(rec.singular_values.size() == 6);
    CHECK(rec.wall_time >= 0.0);
  }
  CHECK(r.history.back().approx_error ==
        doctest::Approx((syn.data.columns() - r.dictionary.atoms() * r.coding.to_sparse()).squaredNorm()));
}

TEST_CASE("training input validation") {
  const SyntheticData syn = make_synthetic(6, 10, 2, 50, 0.01, 7);
  CHECK_THROWS_AS(train(syn.data, 10, short_config(2), IdlMethod{-1.0}), ValidationError);
  CHECK_THROWS_AS(train(syn.data, 10, short_config(2), KsvdReplaceMethod{0.0}), ValidationError);
  TrainConfig bad = short_config(0);
  CHECK_THROWS_AS(train(syn.data, 10, bad, IdlMethod{0.0}), ValidationError);
  const Dictionary wrong(Matrix::Identity(5, 5));
  CHECK_THROWS_AS(train(syn.data, wrong, short_config(1), IdlMethod{0.0}), ValidationError);
}

TEST_CASE("method naming") {
  CHECK(method_name(IdlMethod{1.0}) == "idl");
  CHECK(method_name(KsvdReplaceMethod{0.5}) == "ksvd");
  CHECK(method_name(KsvdInksvdMethod{0.2, 10}) == "inksvd");
  CHECK(method_parameter(KsvdInksvdMethod{0.2, 10}) == 0.2);
}

TEST_CASE("planted dictionary recovery") {
  const SyntheticData syn = make_synthetic(16, 40, 3, 2000, 0.01, 1);
  TrainConfig c;
  c.iterations = 25;
  c.coder = CoderKind::Omp;
  c.coder_param = 3;
  c.seed = 1;
  const TrainResult r = train(syn.data, 40, c, IdlMethod{0.0});
  const double rate = atom_recovery_rate(r.dictionary, syn.planted, 0.99);
  MESSAGE("recovery rate " << rate);
  CHECK(rate >= 0.6);
}
