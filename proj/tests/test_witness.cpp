#include <doctest.h>

#include <cmath>
#include <numbers>

#include "entwit/error.hpp"
#include "entwit/reference_states.hpp"
#include "entwit/witness.hpp"
#include "test_support.hpp"

using namespace entwit;
using entwit::testing::random_unit;

namespace {

const double kSixOverPi2 = 6.0 / (std::numbers::pi * std::numbers::pi);

// I - f1 rho1 - f2 rho2 - f3 rho3, spelled out over the orthonormal vectors.
FiniteRankWitness cyclic_plane_witness(double f1, double f2, double f3) {
  const Dims d{3, 3};
  std::vector<WitnessTerm> terms{{-f1, reference::shifted_maximally_entangled(3, 0)},
                                 {-f2, reference::shifted_maximally_entangled(3, 1)}};
  for (int i = 0; i < 3; ++i) terms.push_back({-f3 / 3.0, BipartiteVector::basis(d, i, (i + 2) % 3)});
  return FiniteRankWitness(d, 1.0, terms);
}

// Direct Tr(W rho) with the dense operator.
double dense_eval(const FiniteRankWitness& w, const DensityOperator& rho) {
  return (w.dense() * rho.matrix()).trace().real();
}

std::vector<MixtureTerm> equal_shift_mixture(int n, const std::vector<double>& q) {
  std::vector<MixtureTerm> terms;
  for (int s = 0; s < n; ++s) terms.push_back({q[s], reference::shifted_maximally_entangled(n, s)});
  return terms;
}

}  // namespace

TEST_CASE("c_bound examples") {
  const auto w1 = reference::shifted_maximally_entangled(3, 0);
  const auto w2 = reference::shifted_maximally_entangled(3, 1);
  const WitnessTerm one{1.0, w1};
  CHECK(c_bound(std::span<const WitnessTerm>(&one, 1)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const std::vector<WitnessTerm> two{{1.0, w1}, {-2.0, w2}};
  CHECK(c_bound(two) == doctest::Approx(1.0).epsilon(1e-14));
  const SequenceWitnessTerm seq{1.0, SequenceVector::inverse_linear(0)};
  CHECK(c_bound(std::span<const SequenceWitnessTerm>(&seq, 1)) == doctest::Approx(kSixOverPi2).epsilon(1e-15));
}

TEST_CASE("witness construction validates orthonormality") {
  const Dims d{2, 2};
  const auto e00 = BipartiteVector::basis(d, 0, 0);
  const auto mix = BipartiteVector::from_flat(d, CVector::Constant(4, 0.5));
  CHECK_THROWS_AS(FiniteRankWitness(d, 1.0, {{1.0, e00}, {1.0, mix}}), ValidationError);
  CHECK_THROWS_AS(FiniteRankWitness(d, 1.0, {{1.0, BipartiteVector::basis({2, 3}, 0, 0)}}), DimensionMismatch);
}

TEST_CASE("special witness of a maximally entangled projector") {
  const auto w1 = reference::shifted_maximally_entangled(3, 0);
  const auto c = special_witness(DensityOperator::pure(w1));
  CHECK(c.is_witness);
  CHECK(c.witness.alpha() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  REQUIRE(c.witness.terms().size() == 1);
  CHECK(c.witness.terms()[0].lambda == doctest::Approx(-1.0));
  CHECK(c.witness.is_non_positive());
  CHECK(c.witness.has_witness_form());
}

TEST_CASE("special witness of a product projector is not a witness") {
  std::mt19937_64 rng(1);
  const auto p = BipartiteVector::product(random_unit(2, rng), random_unit(3, rng));
  const auto c = special_witness(DensityOperator::pure(p));
  CHECK_FALSE(c.is_witness);
  CHECK(c.witness.alpha() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(c.witness.is_non_positive());
}

TEST_CASE("special witness of a weighted-shift projector") {
  const SequenceTerm t{1.0, SequenceVector::inverse_linear(0)};
  const auto c = special_witness(SequenceMixture::validated({t}));
  CHECK(c.is_witness);
  CHECK(c.witness.alpha() == doctest::Approx(kSixOverPi2).epsilon(1e-15));
  CHECK(c.witness.is_non_positive());
}

TEST_CASE("special witness bound holds on random products") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims d{1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 4)};
    const auto rho1 = entwit::testing::random_state(d, 1 + static_cast<int>(rng() % 3), rng);
    const auto c = special_witness(rho1);
    const double cb = c.witness.alpha();
    for (int k = 0; k < 50; ++k) {
      const CVector x = entwit::testing::kron(random_unit(d.a, rng), random_unit(d.b, rng));
      CHECK(std::abs(x.dot(rho1.matrix() * x).real()) <= cb + 1e-12);
    }
    // Flag agrees with the stated eigenvalue test.
    const double top = Eigen::SelfAdjointEigenSolver<CMatrix>(rho1.matrix()).eigenvalues().maxCoeff();
    CHECK(c.is_witness == (top > cb + kReportTol));
  }
}

TEST_CASE("corollary witness on the maximally entangled family") {
  const auto rho = equal_shift_mixture(3, {0.4, 0.3, 0.3});
  const auto r = corollary_witness(rho, 0);
  CHECK(r.margin == doctest::Approx(1.0 / 3.0 - 0.4).epsilon(1e-13));
  CHECK(r.verdict == Verdict::detected);
  CHECK(evaluate(r.witness, DensityOperator::from_mixture(rho)) == doctest::Approx(r.margin).epsilon(1e-12));

  const auto eq = equal_shift_mixture(3, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (std::size_t k = 0; k < 3; ++k) {
    const auto e = corollary_witness(eq, k);
    CHECK(std::abs(e.margin) < 1e-15);
    CHECK(e.verdict == Verdict::not_detected);
  }
  CHECK_THROWS_AS(corollary_witness(eq, 3), ValidationError);
}

TEST_CASE("corollary verdict equals the sign of the evaluation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto q = entwit::testing::random_simplex(3, rng);
    const auto rho = equal_shift_mixture(3, q);
    const auto state = DensityOperator::from_mixture(rho);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto r = corollary_witness(rho, k);
      const double e = evaluate(r.witness, state);
      CHECK(e == doctest::Approx(1.0 / 3.0 - q[k]).epsilon(1e-12));
      CHECK((r.verdict == Verdict::detected) == (e < -kReportTol));
    }
  }
}

TEST_CASE("corollary witness on the weighted-shift mixture") {
  const auto rho = reference::inverse_linear_mixture({0.65, 0.2, 0.15});
  const auto r = corollary_witness(rho, 0);
  CHECK(r.margin == doctest::Approx(kSixOverPi2 - 0.65).epsilon(1e-14));
  CHECK(r.verdict == Verdict::detected);
  CHECK(std::abs(evaluate(r.witness, rho) - (kSixOverPi2 - 0.65)) < 1e-12);
  // Truncated evaluation tends to the same number from a normalised block.
  const double t64 = evaluate(r.witness, rho, TruncationSpec{66, 64});
  const double t4096 = evaluate(r.witness, rho, TruncationSpec{4098, 4096});
  CHECK(std::abs(t4096 - r.margin) < std::abs(t64 - r.margin));
  CHECK(std::abs(t4096 - r.margin) < 1e-3);
}

TEST_CASE("sequence witness truncation agrees with dense evaluation") {
  const auto rho = reference::inverse_linear_mixture({0.65, 0.2, 0.15});
  const auto r = corollary_witness(rho, 0);
  const TruncationSpec spec{18, 16};
  const auto dense_w = r.witness.truncated(spec);
  const auto dense_rho = truncate_normalize(rho, spec);
  CHECK(evaluate(r.witness, rho, spec) == doctest::Approx(dense_eval(dense_w, dense_rho)).epsilon(1e-12));
}

TEST_CASE("evaluate examples") {
  std::mt19937_64 rng(4);
  const auto w1 = cyclic_plane_witness(1.5, 0.3, 3.0);
  const auto w2 = cyclic_plane_witness(0.3, 1.5, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = entwit::testing::random_simplex(3, rng);
    const auto rho = reference::cyclic_state(q[0], q[1], q[2]);
    CHECK(std::abs(evaluate(w1, rho) - (-0.5 * q[0] + 0.7 * q[1])) < 1e-12);
    CHECK(std::abs(evaluate(w2, rho) - (0.7 * q[0] - 0.5 * q[1])) < 1e-12);
    CHECK(std::abs(evaluate(w1, rho) - dense_eval(w1, rho)) < 1e-12);
  }
  const FiniteRankWitness id({2, 3}, 1.0, {});
  CHECK(evaluate(id, entwit::testing::random_state({2, 3}, 3, rng)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(evaluate(id, entwit::testing::random_state({3, 2}, 1, rng)), DimensionMismatch);
}

TEST_CASE("evaluate is linear") {
  std::mt19937_64 rng(5);
  const Dims d{3, 3};
  const auto w = cyclic_plane_witness(1.2, 0.4, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r1 = entwit::testing::random_state(d, 2, rng);
    const auto r2 = entwit::testing::random_state(d, 2, rng);
    const double p = 0.3;
    std::vector<MixtureTerm> terms;
    for (const auto& t : *r1.decomposition()) terms.push_back({p * t.weight, t.vector});
    for (const auto& t : *r2.decomposition()) terms.push_back({(1 - p) * t.weight, t.vector});
    const auto mix = DensityOperator::from_mixture(terms);
    CHECK(evaluate(w, mix) == doctest::Approx(p * evaluate(w, r1) + (1 - p) * evaluate(w, r2)).epsilon(1e-12));
  }
  // Linear in the coefficient list.
  const auto a = cyclic_plane_witness(1.0, 0.0, 0.0);
  const auto b = cyclic_plane_witness(0.0, 1.0, 0.0);
  const auto ab = cyclic_plane_witness(2.0, 3.0, 0.0);
  const auto rho = reference::cyclic_state(0.2, 0.3, 0.5);
  // (I - 2r1 - 3r2) = 2(I - r1) + 3(I - r2) - 4I
  CHECK(evaluate(ab, rho) == doctest::Approx(2 * evaluate(a, rho) + 3 * evaluate(b, rho) - 4.0).epsilon(1e-12));
}

TEST_CASE("witness_report margin and verdict") {
  const auto w1 = cyclic_plane_witness(1.5, 0.3, 3.0);
  const auto rep = witness_report(w1, reference::cyclic_state(0.2, 0.1, 0.7));
  CHECK(rep.margin == doctest::Approx(-0.03).epsilon(1e-12));
  CHECK(rep.verdict == Verdict::detected);
  CHECK(rep.criterion == "witness");
}

TEST_CASE("certify examples") {
  const auto w1 = reference::shifted_maximally_entangled(3, 0);
  const auto special = special_witness(DensityOperator::pure(w1)).witness;
  const auto c = certify(special);
  CHECK(std::abs(c.infimum) < 1e-9);
  CHECK(c.certified);
  CHECK(c.method == "seesaw");
  CHECK(c.restarts == 64);

  const auto plane = certify(cyclic_plane_witness(1.5, 0.3, 3.0));
  CHECK(std::abs(plane.infimum) < 1e-4);
  CHECK(plane.certified);

  std::mt19937_64 rng(6);
  const auto p = BipartiteVector::product(random_unit(2, rng), random_unit(2, rng));
  const FiniteRankWitness bad({2, 2}, 1.0, {{-2.0, p}});
  const auto b = certify(bad);
  CHECK(b.infimum == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK_FALSE(b.certified);
}

TEST_CASE("certified witnesses are non-negative on separable mixtures") {
  std::mt19937_64 rng(7);
  int certified = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Dims d{2 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 3)};
    const auto rho1 = entwit::testing::random_state(d, 1 + static_cast<int>(rng() % 2), rng);
    const auto c = special_witness(rho1);
    OptimizerConfig cfg;
    cfg.seed = trial;
    const auto cert = certify(c.witness, cfg);
    if (!cert.certified) continue;
    ++certified;
    for (int k = 0; k < 20; ++k) {
      const auto sep = entwit::testing::random_separable(d, 1 + static_cast<int>(rng() % 5), rng);
      CHECK(evaluate(c.witness, sep) >= -1e-8);
    }
  }
  CHECK(certified > 0);
}

TEST_CASE("non-positivity uses the compression to the range") {
  const Dims d{2, 2};
  const auto e00 = BipartiteVector::basis(d, 0, 0);
  // Proper range: alpha decides when all lambdas are non-negative.
  CHECK_FALSE(FiniteRankWitness(d, 0.5, {{1.0, e00}}).is_non_positive());
  CHECK(FiniteRankWitness(d, -0.5, {{1.0, e00}}).is_non_positive());
  CHECK(FiniteRankWitness(d, 0.5, {{-0.6, e00}}).is_non_positive());
  CHECK_FALSE(FiniteRankWitness(d, 0.5, {{-0.5, e00}}).is_non_positive());
  // Full range: only alpha + min lambda matters.
  std::vector<WitnessTerm> full;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) full.push_back({1.0, BipartiteVector::basis(d, i, j)});
  CHECK_FALSE(FiniteRankWitness(d, -0.5, full).is_non_positive());
  // Dense eigenvalue oracle agrees on random instances.
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dec = orthonormal_decomposition(entwit::testing::random_state({2, 3}, 3, rng));
    std::vector<WitnessTerm> terms;
    std::normal_distribution<double> g(0.0, 1.0);
    for (const auto& t : dec) terms.push_back({g(rng), t.vector});
    const FiniteRankWitness w({2, 3}, g(rng), terms);
    const double lo = Eigen::SelfAdjointEigenSolver<CMatrix>(w.dense()).eigenvalues()(0);
    CHECK(w.is_non_positive() == (lo < -kReportTol));
  }
}

TEST_CASE("constructed witnesses equal alpha on product basis states outside their support") {
  std::vector<FiniteRankWitness> built;
  built.push_back(special_witness(DensityOperator::pure(reference::shifted_maximally_entangled(3, 0))).witness);
  built.push_back(corollary_witness(equal_shift_mixture(3, {0.5, 0.3, 0.2}), 1).witness);
  built.push_back(cyclic_plane_witness(1.5, 0.3, 3.0));
  const auto seq = reference::inverse_linear_mixture({0.65, 0.2, 0.15});
  built.push_back(corollary_witness(seq, 0).witness.truncated({10, 8}));
  built.push_back(special_witness(seq).witness.truncated({10, 8}));
  std::mt19937_64 rng(9);
  built.push_back(special_witness(entwit::testing::random_state({2, 3}, 2, rng)).witness);

  for (const auto& w : built) {
    const Dims big{w.dims().a + 1, w.dims().b + 1};
    const auto e = w.embedded(big);
    CHECK(e.alpha() == w.alpha());
    for (int i = 0; i < big.a; ++i)
      for (int j = 0; j < big.b; ++j) {
        if (i < w.dims().a && j < w.dims().b) continue;
        const auto sigma = DensityOperator::pure(BipartiteVector::basis(big, i, j));
        CHECK(evaluate(e, sigma) == w.alpha());
      }
    // Alpha itself is the separable infimum floor for these constructions.
    CHECK(w.alpha() >= 0.0);
  }
}
