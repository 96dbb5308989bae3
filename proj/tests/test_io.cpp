#include <doctest.h>

#include <cmath>
#include <numbers>

#include "entwit/io.hpp"
#include "entwit/reference_states.hpp"
#include "test_support.hpp"

using namespace entwit;
using nlohmann::json;

namespace {

const char* kBadWeights = R"({
  "kind": "mixture",
  "dims": [2, 2],
  "terms": [
    {"weight": 0.5, "coeffs": [[1, 0], [0, 0], [0, 0], [0, 0]]},
    {"weight": 0.4, "coeffs": [[0, 0], [0, 0], [0, 0], [1, 0]]}
  ]
})";

}  // namespace

TEST_CASE("parse a mixture state") {
  const std::string text = R"({
    "kind": "mixture", "dims": [2, 2],
    "terms": [
      {"weight": 0.5, "coeffs": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]], "component": 3},
      {"weight": 0.5, "coeffs": [[0, 0], [0, 1], [0, 0], [0, 0]]}
    ]})";
  const auto s = io::parse_state(text);
  REQUIRE(s.state);
  CHECK(s.kind == io::StateKind::mixture);
  CHECK(s.state->dims() == Dims{2, 2});
  CHECK(s.component_labels == std::vector<int>{3, 1});
  CHECK(std::abs(s.state->matrix()(1, 1) - 0.5) < 1e-15);
  CHECK(std::abs(s.state->matrix()(0, 3) - 0.25) < 1e-15);
}

TEST_CASE("parse a dense state") {
  const std::string text = R"({"kind": "dense", "dims": [1, 2],
    "matrix": [[[0.5, 0], [0, -0.5]], [[0, 0.5], [0.5, 0]]]})";
  const auto s = io::parse_state(text);
  REQUIRE(s.state);
  CHECK(s.state->matrix()(0, 1) == Complex(0, -0.5));
  CHECK_FALSE(s.state->decomposition());
}

TEST_CASE("parse a weighted-shift mixture") {
  const std::string text = R"js({"kind": "sequence-mixture", "terms": [
    {"weight": 0.65, "family": "inverse-linear", "shift": 0},
    {"weight": 0.35, "family": "geometric(0.5)", "shift": 2}]})js";
  const auto s = io::parse_state(text);
  REQUIRE(s.sequence);
  CHECK(s.sequence->terms()[1].vector.family() == WeightFamily::geometric);
  CHECK(s.sequence->terms()[1].vector.ratio() == 0.5);
  CHECK(s.sequence->max_shift() == 2);
  CHECK(io::family_name(s.sequence->terms()[1].vector) == "geometric(0.5)");
  CHECK_THROWS_AS(io::parse_family("harmonic", 0), ValidationError);
}

TEST_CASE("weight errors name the field and the line") {
  try {
    (void)io::parse_state(kBadWeights);
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(e.field() == "terms");
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("weights sum 0.9 ≠ 1") != std::string::npos);
  }
}

TEST_CASE("schema errors name the field and the line") {
  const std::string text = "{\n  \"kind\": \"mixture\",\n  \"dims\": [2, 2],\n  \"terms\": [\n    {\"weight\": \"x\"}\n  ]\n}";
  try {
    (void)io::parse_state(text);
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(e.field() == "terms/0/weight");
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(io::parse_state("{not json"), io::ParseError);
  CHECK_THROWS_AS(io::parse_state(R"({"kind": "tensor"})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_state(R"({"kind": "mixture", "dims": [2, 2], "terms": [{"weight": 1, "coeffs": [[1, 0]]}]})"),
                  io::ParseError);
}

TEST_CASE("value_lines maps pointers to lines") {
  const auto lines = io::value_lines(kBadWeights);
  auto find = [&](const std::string& p) {
    for (const auto& [k, v] : lines)
      if (k == p) return v;
    return -1;
  };
  CHECK(find("") == 1);
  CHECK(find("/kind") == 2);
  CHECK(find("/terms/1/weight") == 6);
}

TEST_CASE("witness JSON round trip is bit-identical") {
  std::mt19937_64 rng(1);
  const auto rho1 = entwit::testing::random_state({2, 3}, 2, rng);
  const auto w = special_witness(rho1).witness.with_certification(certify(special_witness(rho1).witness));
  const auto back = std::get<FiniteRankWitness>(io::parse_witness(io::to_json(w).dump(2)));
  CHECK(back.alpha() == w.alpha());
  REQUIRE(back.terms().size() == w.terms().size());
  for (std::size_t k = 0; k < w.terms().size(); ++k) {
    CHECK(back.terms()[k].lambda == w.terms()[k].lambda);
    CHECK((back.terms()[k].omega.coeffs() - w.terms()[k].omega.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  }
  REQUIRE(back.certification());
  CHECK(back.certification()->infimum == w.certification()->infimum);
  for (int k = 0; k < 10; ++k) {
    const auto sigma = entwit::testing::random_state({2, 3}, 3, rng);
    CHECK(evaluate(back, sigma) == evaluate(w, sigma));
  }
  CHECK(io::to_json(back).dump() == io::to_json(w).dump());
}

TEST_CASE("sequence witness round trip") {
  const auto rho = reference::inverse_linear_mixture({0.65, 0.2, 0.15});
  const auto w = corollary_witness(rho, 0).witness;
  const auto back = std::get<SequenceWitness>(io::parse_witness(io::to_json(w).dump()));
  CHECK(back.alpha() == w.alpha());
  CHECK(evaluate(back, rho) == evaluate(w, rho));
}

TEST_CASE("state JSON round trip") {
  const auto terms = reference::cyclic_terms(0.2, 0.1, 0.7);
  const auto j = io::state_to_json(terms);
  const auto s = io::parse_state(j.dump());
  REQUIRE(s.state);
  CHECK((s.state->matrix() - reference::cyclic_state(0.2, 0.1, 0.7).matrix()).cwiseAbs().maxCoeff() == 0.0);
  const auto dense = io::parse_state(io::state_to_json(DensityOperator::validated({3, 3}, s.state->matrix())).dump());
  CHECK((dense.state->matrix() - s.state->matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("report JSON carries the stable keys") {
  const auto r = ppt_check(reference::cyclic_state(0.2, 0.1, 0.7));
  const json j = io::to_json(r);
  for (const char* key : {"criterion", "verdict", "margin", "tolerance", "config"}) CHECK(j.contains(key));
  CHECK(j["verdict"] == "not-detected");
}

TEST_CASE("doubles serialise to a round-tripping decimal") {
  const double x = std::numbers::pi / 7.0;
  const json j = x;
  CHECK(json::parse(j.dump()).get<double>() == x);
}
