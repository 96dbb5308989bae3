#include <doctest.h>

#include <cmath>

#include "entwit/error.hpp"
#include "entwit/hyperplane.hpp"
#include "entwit/reference_states.hpp"
#include "test_support.hpp"

using namespace entwit;
using entwit::testing::random_unit;

namespace {

FeatureMap cyclic_map() { return FeatureMap(reference::cyclic_components()); }

RVector vec3(double a, double b, double c) {
  RVector v(3);
  v << a, b, c;
  return v;
}

CVector cvec(std::initializer_list<double> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// The closed-form coordinates for real local vectors, written with the
// one-based indices of the hand derivation mapped to zero-based arrays.
RVector closed_form(const CVector& a, const CVector& b) {
  auto x = [&](int i) { return a(i - 1).real(); };
  auto y = [&](int i) { return b(i - 1).real(); };
  const double c1 = std::pow(x(1) * y(1) + x(2) * y(2) + x(3) * y(3), 2) / 3.0;
  const double c2 = std::pow(x(1) * y(2) + x(2) * y(3) + x(3) * y(1), 2) / 3.0;
  const double c3 = (x(1) * x(1) * y(3) * y(3) + x(2) * x(2) * y(1) * y(1) + x(3) * x(3) * y(2) * y(2)) / 3.0;
  return vec3(c1, c2, c3);
}

}  // namespace

TEST_CASE("feature map rejects non-orthogonal components") {
  const Dims d{2, 2};
  const auto a = DensityOperator::pure(BipartiteVector::basis(d, 0, 0));
  const auto b = DensityOperator::pure(BipartiteVector::from_flat(d, CVector::Constant(4, 0.5)));
  CHECK_THROWS_AS(FeatureMap({a, b}), ValidationError);
  CHECK_THROWS_AS(FeatureMap({}), ValidationError);
}

TEST_CASE("feature vectors of the components are the unit points") {
  const auto map = cyclic_map();
  for (int i = 0; i < 3; ++i) {
    const RVector v = feature_vector(map, map.components()[i]);
    for (int j = 0; j < 3; ++j) {
      const double want = i == j ? (i == 2 ? 1.0 / 3.0 : 1.0) : 0.0;
      CHECK(v(j) == doctest::Approx(want).epsilon(1e-14));
    }
  }
}

TEST_CASE("feature vectors of product states match the closed form") {
  const auto map = cyclic_map();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const CVector a = entwit::testing::random_real_unit(3, rng).cast<Complex>();
    const CVector b = entwit::testing::random_real_unit(3, rng).cast<Complex>();
    CHECK((feature_vector(map, a, b) - closed_form(a, b)).cwiseAbs().maxCoeff() < 1e-14);
    const auto sigma = DensityOperator::pure(BipartiteVector::product(a, b));
    CHECK((feature_vector(map, sigma) - closed_form(a, b)).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK_THROWS_AS(feature_vector(map, DensityOperator::pure(BipartiteVector::basis({2, 2}, 0, 0))),
                  DimensionMismatch);
}

TEST_CASE("fixture points") {
  const auto map = cyclic_map();
  const CVector u = CVector::Constant(3, 1.0 / std::sqrt(3.0));
  const CVector h = cvec({1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0.0});
  CHECK((feature_vector(map, u, u) - vec3(1.0 / 3, 1.0 / 3, 1.0 / 9)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((feature_vector(map, h, h) - vec3(1.0 / 3, 1.0 / 12, 1.0 / 12)).cwiseAbs().maxCoeff() < 1e-14);
  const RVector f = feature_vector(map, cvec({-0.707104, 0.672502, -0.218509}), cvec({0.707107, -0.706824, -0.0199903}));
  CHECK((f - vec3(0.314261, 0.0367071, 0.0833943)).cwiseAbs().maxCoeff() < 1e-5);
  const RVector g = feature_vector(map, cvec({0.876317, -0.0152726, 0.481493}), cvec({0.481493, -0.0152726, 0.876317}));
  CHECK((g - vec3(0.237509, 0.0140176, 0.196609)).cwiseAbs().maxCoeff() < 1e-5);
  // Vertices A, B, C at basis-aligned products.
  CVector e0 = CVector::Zero(3), e1 = CVector::Zero(3), e2 = CVector::Zero(3);
  e0(0) = e1(1) = e2(2) = 1.0;
  CHECK((feature_vector(map, e0, e2) - vec3(0, 0, 1.0 / 3)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("feature vectors are linear and separable coordinates are bounded") {
  const auto map = cyclic_map();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sep = entwit::testing::random_separable({3, 3}, 4, rng);
    const RVector v = feature_vector(map, sep);
    CHECK(v.maxCoeff() <= 1.0 / 3.0 + 1e-6);
    CHECK(v.minCoeff() >= -1e-15);
    RVector sum = RVector::Zero(3);
    for (const auto& t : *sep.decomposition()) sum += t.weight * feature_vector(map, DensityOperator::pure(t.vector));
    CHECK((sum - v).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("plane witness is I minus the combination") {
  const auto map = cyclic_map();
  const auto w = plane_witness(map, vec3(1.5, 0.3, 3.0));
  CHECK(w.alpha() == 1.0);
  const CMatrix want = CMatrix::Identity(9, 9) - map.combination(vec3(1.5, 0.3, 3.0));
  CHECK((w.dense() - want).cwiseAbs().maxCoeff() < 1e-14);
  const auto rho = reference::cyclic_state(1.0 / 3, 1.0 / 3, 1.0 / 3);
  // f.L(rho) = 1 - (-0.5 + 0.7)/3 < 1: no violation from this plane.
  CHECK(feature_vector(map, rho).dot(vec3(1.5, 0.3, 3.0)) == doctest::Approx(1.0 - (-0.5 + 0.7) / 3.0));
  CHECK(evaluate(w, rho) == doctest::Approx((-0.5 + 0.7) / 3.0).epsilon(1e-12));
}

TEST_CASE("check_plane examples") {
  const auto map = cyclic_map();
  const auto tangent = check_plane(map, vec3(1.5, 0.3, 3.0));
  CHECK(std::abs(tangent.separable_max - 1.0) < 1e-4);
  CHECK(tangent.tangent);
  const auto near = check_plane(map, vec3(1.71, 0.29, 3.0));
  CHECK(std::abs(near.separable_max - 1.0174) < 2e-3);
  CHECK_FALSE(near.tangent);
  const auto far = check_plane(map, vec3(3.0, -1.0, 3.0));
  CHECK(far.separable_max >= 13.0 / 12.0 - 1e-4);
  CHECK_FALSE(far.tangent);
}

TEST_CASE("search on the PPT entangled point of the cyclic family") {
  const auto map = cyclic_map();
  const auto rho = reference::cyclic_state(0.2, 0.1, 0.7);
  const auto out = search(map, rho);
  REQUIRE_MESSAGE(out.success(), out.failure);
  const auto& r = *out.result;
  CHECK(r.violation > 0.0);
  CHECK(r.separable_max >= 1.0 - 1e-4);
  CHECK(r.separable_max <= 1.0 + 1e-4);
  CHECK(r.certification.infimum >= -1e-4);
  CHECK(evaluate(r.witness, rho) < 0.0);
  CHECK(r.witness_value == doctest::Approx(evaluate(r.witness, rho)).epsilon(1e-12));
  CHECK(out.box == 100.0);
  CHECK(!out.trace.empty());
  // Separable states stay on the non-negative side.
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) CHECK(evaluate(r.witness, entwit::testing::random_separable({3, 3}, 3, rng)) >= -1e-4);
}

TEST_CASE("search is deterministic under a fixed seed") {
  const auto map = cyclic_map();
  const auto rho = reference::cyclic_state(0.2, 0.1, 0.7);
  const auto a = search(map, rho), b = search(map, rho);
  REQUIRE(a.success());
  REQUIRE(b.success());
  CHECK((a.result->coefficients - b.result->coefficients).norm() == 0.0);
}

TEST_CASE("single-component search rescales to the separable maximum") {
  const auto p = DensityOperator::pure(reference::shifted_maximally_entangled(3, 0));
  const FeatureMap map({p});
  const auto out = search(map, p);
  REQUIRE_MESSAGE(out.success(), out.failure);
  const auto& r = *out.result;
  CHECK(r.coefficients(0) == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(r.witness_value == doctest::Approx(-2.0).epsilon(1e-4));
  // Same direction as the corollary witness (1/3) I - rho_1, scaled by 3.
  const MixtureTerm t{1.0, reference::shifted_maximally_entangled(3, 0)};
  const auto cor = corollary_witness(std::span<const MixtureTerm>(&t, 1), 0);
  CHECK((r.witness.dense() - 3.0 * cor.witness.dense()).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("search fails cleanly on a separable target") {
  const auto map = cyclic_map();
  const auto rho = DensityOperator::pure(BipartiteVector::basis({3, 3}, 0, 2));
  const auto out = search(map, rho);
  CHECK_FALSE(out.success());
  CHECK(!out.failure.empty());
}

TEST_CASE("support projector and remainder bookkeeping") {
  const auto map = cyclic_map();
  const CMatrix p = map.support_projector();
  // rank 1 + 1 + 3
  CHECK(p.trace().real() == doctest::Approx(5.0));
  const Dims d{3, 3};
  const auto e00 = DensityOperator::pure(BipartiteVector::basis(d, 0, 0));
  const FeatureMap partial({e00});
  CHECK(partial.support_projector().trace().real() == doctest::Approx(1.0));
  // Target with mass outside the component span: remainder is accounted for.
  const std::vector<MixtureTerm> terms{{0.9, reference::shifted_maximally_entangled(3, 0)},
                                       {0.1, BipartiteVector::basis(d, 0, 1)}};
  const FeatureMap one({DensityOperator::pure(reference::shifted_maximally_entangled(3, 0))});
  const auto out = search(one, DensityOperator::from_mixture(terms));
  REQUIRE_MESSAGE(out.success(), out.failure);
  CHECK(out.result->component_mass == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(out.result->remainder_ratio == doctest::Approx(0.1 / 0.9).epsilon(1e-12));
  CHECK(out.result->remainder_ratio < -out.result->reduced_witness_value);
}
