#include "entwit/cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "entwit/criteria.hpp"
#include "entwit/hyperplane.hpp"
#include "entwit/io.hpp"
#include "entwit/reference_states.hpp"
#include "entwit/witness.hpp"

namespace entwit::cli {

using nlohmann::json;

namespace {

std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string vec_str(const RVector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g6(v(i));
  return s + ")";
}

constexpr double kSixOverPiSq = 6.0 / (std::numbers::pi * std::numbers::pi);

// Options shared by several subcommands.
struct Common {
  double tol = kReportTol;
  int restarts = 64;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> truncate;
  bool json = false;

  OptimizerConfig optimizer() const {
    OptimizerConfig c;
    c.restarts = restarts;
    c.seed = seed;
    return c;
  }
};

void add_optimizer_flags(CLI::App* app, Common& c) {
  app->add_option("--restarts", c.restarts, "see-saw restarts")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "seed for restart initialisation");
}

// A state ready for dense criteria, plus the truncation record for weighted-shift files.
struct LoadedState {
  io::StateFile file;
  DensityOperator dense;
  std::optional<TruncationSpec> dense_spec;
  std::optional<TruncationSpec> tail_spec;
};

TruncationSpec dense_default_spec(const SequenceMixture& seq) {
  const std::int64_t s = seq.max_shift();
  std::int64_t n = 1;
  while ((n + 1 + s) * (n + 1) <= kDenseSequenceCap) ++n;
  return {n + s, n};
}

LoadedState load(const std::string& path, const Common& c) {
  io::StateFile f = io::load_state(path);
  if (f.kind != io::StateKind::sequence_mixture) {
    DensityOperator rho = *f.state;
    return {std::move(f), std::move(rho), std::nullopt, std::nullopt};
  }
  const SequenceMixture& seq = *f.sequence;
  const TruncationSpec tail = seq.tail_rule_spec();
  const TruncationSpec dense =
      c.truncate ? TruncationSpec{*c.truncate + seq.max_shift(), *c.truncate} : dense_default_spec(seq);
  DensityOperator rho = truncate_normalize(seq, dense);
  return {std::move(f), std::move(rho), dense, tail};
}

json spec_json(const TruncationSpec& s) { return json::array({s.rows, s.cols}); }

// Tr(W rho) for whichever witness representation was loaded.
double evaluate_any(const io::AnyWitness& w, const LoadedState& st, const Common& c) {
  if (const auto* sw = std::get_if<SequenceWitness>(&w)) {
    if (st.file.kind != io::StateKind::sequence_mixture) {
      return evaluate(sw->truncated({st.dense.dims().a, st.dense.dims().b}), st.dense);
    }
    const TruncationSpec spec = c.truncate ? *st.dense_spec : *st.tail_spec;
    return evaluate(*sw, *st.file.sequence, spec);
  }
  return evaluate(std::get<FiniteRankWitness>(w), st.dense);
}

void print_reports(std::ostream& out, const std::vector<CriterionReport>& reports) {
  out << std::left << std::setw(14) << "criterion" << std::setw(15) << "verdict" << std::setw(26) << "margin"
      << "tolerance\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(14) << r.criterion << std::setw(15) << to_string(r.verdict) << std::setw(26)
        << g17(r.margin) << g6(r.tolerance) << "\n";
  }
}

int cmd_check(const std::string& path, const std::string& witness_path, const Common& c, std::ostream& out) {
  const LoadedState st = load(path, c);
  std::vector<CriterionReport> reports{ppt_check(st.dense, c.tol), realignment_check(st.dense, c.tol)};
  if (!witness_path.empty()) {
    const io::AnyWitness w = io::load_witness(witness_path);
    CriterionReport r;
    r.criterion = "witness";
    r.margin = evaluate_any(w, st, c);
    r.tolerance = c.tol;
    r.verdict = verdict_below(r.margin, c.tol);
    r.dims = st.dense.dims();
    r.metadata["witness"] = witness_path;
    if (const auto* fw = std::get_if<FiniteRankWitness>(&w)) {
      r.metadata["alpha"] = g17(fw->alpha());
      if (fw->certification()) {
        r.metadata["separable_infimum"] = g17(fw->certification()->infimum);
        r.metadata["certification_source"] = "file";
      } else {
        const Certification cert = certify(*fw, c.optimizer());
        r.metadata["separable_infimum"] = g17(cert.infimum);
        r.metadata["certification_source"] = "seesaw";
      }
      r.metadata["restarts"] = std::to_string(c.restarts);
      r.metadata["seed"] = std::to_string(c.seed);
    } else {
      r.metadata["alpha"] = g17(std::get<SequenceWitness>(w).alpha());
    }
    reports.push_back(r);
  }

  if (c.json) {
    json j = {{"state", path}, {"dims", {st.dense.dims().a, st.dense.dims().b}}, {"reports", json::array()}};
    for (const auto& r : reports) j["reports"].push_back(io::to_json(r));
    if (st.dense_spec) {
      j["truncation"] = {{"dense", spec_json(*st.dense_spec)},
                         {"tail_rule", spec_json(*st.tail_spec)},
                         {"compressed_trace", st.file.sequence->compressed_trace(*st.dense_spec)}};
    }
    out << j.dump(2) << "\n";
    return kOk;
  }
  out << "state: " << path << "  dims " << st.dense.dims().a << "x" << st.dense.dims().b << "\n";
  if (st.dense_spec) {
    out << "truncation: dense " << st.dense_spec->rows << "x" << st.dense_spec->cols << " (compressed trace "
        << g17(st.file.sequence->compressed_trace(*st.dense_spec)) << "), tail rule "
        << st.tail_spec->rows << "x" << st.tail_spec->cols << "\n";
  }
  print_reports(out, reports);
  return kOk;
}

std::vector<DensityOperator> components_from_labels(const io::StateFile& f) {
  const auto& terms = *f.state->decomposition();
  std::vector<int> order;
  std::map<int, std::vector<MixtureTerm>> groups;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const int label = f.component_labels[k];
    if (!groups.count(label)) order.push_back(label);
    groups[label].push_back(terms[k]);
  }
  std::vector<DensityOperator> out;
  for (int label : order) {
    auto g = groups[label];
    double total = 0.0;
    for (const auto& t : g) total += t.weight;
    if (total <= 0.0) {
      // A zero-weight group still defines its component: weight its vectors equally.
      for (auto& t : g) t.weight = 1.0 / static_cast<double>(g.size());
    } else {
      for (auto& t : g) t.weight /= total;
    }
    out.push_back(DensityOperator::from_mixture(g));
  }
  return out;
}

int cmd_construct(const std::string& path, const std::string& mode, int k0, const std::string& output,
                  const Common& c, std::ostream& out, std::ostream& err) {
  const io::StateFile f = io::load_state(path);
  if (mode == "special") {
    if (f.kind == io::StateKind::sequence_mixture) {
      const auto built = special_witness(*f.sequence, c.tol);
      io::write_json(output, io::to_json(built.witness));
      out << "special witness: alpha " << g17(built.witness.alpha()) << ", rank " << built.witness.terms().size()
          << ", " << (built.is_witness ? "valid witness" : "not a witness (operator is positive)") << "\n";
      return kOk;
    }
    const auto built = special_witness(*f.state, c.tol);
    io::write_json(output, io::to_json(built.witness));
    out << "special witness: alpha " << g17(built.witness.alpha()) << ", rank " << built.witness.terms().size()
        << ", " << (built.is_witness ? "valid witness" : "not a witness (operator is positive)") << "\n";
    return kOk;
  }
  if (mode == "corollary") {
    if (k0 < 1) throw ValidationError("--k0 is 1-based and must be at least 1");
    const auto index = static_cast<std::size_t>(k0 - 1);
    if (f.kind == io::StateKind::sequence_mixture) {
      const auto res = corollary_witness(*f.sequence, index, c.tol);
      io::write_json(output, io::to_json(res.witness));
      out << "corollary witness k0=" << k0 << ": alpha " << g17(res.witness.alpha()) << ", Tr(W rho) "
          << g17(res.margin) << ", " << to_string(res.verdict) << "\n";
      return kOk;
    }
    const auto terms = f.state->decomposition() ? *f.state->decomposition() : orthonormal_decomposition(*f.state);
    const auto res = corollary_witness(terms, index, c.tol);
    io::write_json(output, io::to_json(res.witness));
    out << "corollary witness k0=" << k0 << ": alpha " << g17(res.witness.alpha()) << ", Tr(W rho) "
        << g17(res.margin) << ", " << to_string(res.verdict) << "\n";
    return kOk;
  }
  // hyperplane
  if (f.kind != io::StateKind::mixture) throw ValidationError("hyperplane construction needs a mixture state");
  const FeatureMap map(components_from_labels(f));
  SearchConfig cfg;
  cfg.oracle = c.optimizer();
  const SearchOutcome res = search(map, *f.state, cfg);
  if (!res.success()) {
    err << "hyperplane search failed after " << res.trace.size() << " rounds: " << res.failure << "\n";
    return kFailed;
  }
  io::write_json(output, io::to_json(res.result->witness));
  out << "hyperplane witness: f = " << vec_str(res.result->coefficients) << ", separable max "
      << g17(res.result->separable_max) << ", Tr(W rho) " << g17(res.result->witness_value) << ", rounds "
      << res.trace.size() << ", cuts " << res.result->cuts << "\n";
  return kOk;
}

int cmd_evaluate(const std::string& witness_path, const std::vector<std::string>& states, const Common& c,
                 std::ostream& out) {
  const io::AnyWitness w = io::load_witness(witness_path);
  json rows = json::array();
  for (const auto& s : states) {
    const LoadedState st = load(s, c);
    const double v = evaluate_any(w, st, c);
    if (c.json) {
      rows.push_back({{"state", s}, {"value", v}});
    } else {
      out << s << "\t" << g17(v) << "\n";
    }
  }
  if (c.json) out << rows.dump(2) << "\n";
  return kOk;
}

int cmd_certify(const std::string& witness_path, const std::string& output, double cert_tol, const Common& c,
                std::ostream& out) {
  const io::AnyWitness any = io::load_witness(witness_path);
  FiniteRankWitness w = [&] {
    if (const auto* sw = std::get_if<SequenceWitness>(&any)) {
      if (!c.truncate) throw ValidationError("sequence witnesses need --truncate N for certification");
      return sw->truncated({*c.truncate + sw->max_shift(), *c.truncate});
    }
    return std::get<FiniteRankWitness>(any);
  }();
  const Certification cert = certify(w, c.optimizer(), cert_tol);
  w = w.with_certification(cert);
  const json j = io::to_json(w);
  if (output.empty()) {
    out << j.dump(2) << "\n";
  } else {
    io::write_json(output, j);
    out << "certification: infimum " << g17(cert.infimum) << ", method " << cert.method << ", restarts "
        << cert.restarts << ", " << (cert.certified ? "certified" : "not certified") << "\n";
  }
  return kOk;
}

int cmd_reproduce(const std::string& example, const Common& c, std::ostream& out) {
  const auto rows = reproduce(example, c.optimizer());
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.pass;
  if (c.json) {
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back({{"row", r.name},
                   {"expected", r.expected},
                   {"computed", r.computed},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
    }
    out << json{{"example", example}, {"rows", j}, {"pass", ok}}.dump(2) << "\n";
  } else {
    out << "example " << example << "\n";
    out << std::left << std::setw(44) << "row" << std::setw(36) << "expected" << std::setw(36) << "computed"
        << std::setw(12) << "tolerance" << "status\n";
    for (const auto& r : rows) {
      out << std::left << std::setw(44) << r.name << std::setw(36) << r.expected << std::setw(36) << r.computed
          << std::setw(12) << r.tolerance << (r.pass ? "pass" : "FAIL") << "\n";
    }
  }
  return ok ? kOk : kFailed;
}

// Reproduction tables.

ReproRow near(std::string name, std::string expected, double target, double computed, double tol) {
  return {std::move(name), std::move(expected), g17(computed), g6(tol), std::abs(computed - target) <= tol};
}

std::vector<ReproRow> reproduce_33() {
  std::vector<ReproRow> rows;
  const std::array<double, 3> p{0.65, 0.2, 0.15};
  const SequenceMixture rho = reference::inverse_linear_mixture(p);
  for (int k = 0; k < 3; ++k) {
    const double n2 = shift_family_sq_norm(rho.terms()[k].vector);
    rows.push_back(near("||D_" + std::to_string(k + 1) + "||^2 (closed form)", "6/pi^2", kSixOverPiSq, n2, 1e-15));
  }
  const TruncationSpec svd_spec{202, 200};
  for (int k = 0; k < 3; ++k) {
    const double n = coefficient_operator_norm(rho.terms()[k].vector.truncated(svd_spec));
    rows.push_back(near("||D_" + std::to_string(k + 1) + "||^2 (SVD, N=200)", "6/pi^2", kSixOverPiSq, n * n, 1e-4));
  }
  const SequenceMixture pure1 = SequenceMixture::validated({{1.0, SequenceVector::inverse_linear(0)}});
  const auto special = special_witness(pure1);
  rows.push_back(near("c bound of |w1><w1|", "6/pi^2", kSixOverPiSq, special.witness.alpha(), 1e-15));
  rows.push_back({"(6/pi^2) I - |w1><w1| is a witness", "yes", special.is_witness ? "yes" : "no", "-",
                  special.is_witness});
  const TruncationSpec spec = rho.tail_rule_spec();
  const double v = evaluate(special.witness, rho, spec);
  rows.push_back(near("Tr(W rho), p=(0.65,0.2,0.15), N=" + std::to_string(spec.cols), "6/pi^2 - 0.65",
                      kSixOverPiSq - 0.65, v, 1e-6));
  const auto cor = corollary_witness(rho, 0);
  rows.push_back({"corollary witness detects at p1=0.65", "detected", to_string(cor.verdict), "1e-09",
                  cor.verdict == Verdict::detected});
  bool monotone = true;
  double prev = 0.0;
  for (std::int64_t n = 1; n <= 4096; n *= 2) {
    const double t = rho.compressed_trace({n + 2, n});
    monotone = monotone && t > prev && t < 1.0;
    prev = t;
  }
  rows.push_back({"compressed trace increases toward 1", "monotone", monotone ? "monotone" : "not monotone", "-",
                  monotone});
  return rows;
}

std::vector<ReproRow> reproduce_34(const OptimizerConfig& cfg) {
  std::vector<ReproRow> rows;
  int matches = 0;
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double q1 = k / 20.0;
    const std::array<double, 3> q{q1, (1.0 - q1) / 2.0, (1.0 - q1) / 2.0};
    const DensityOperator rho = reference::shifted_basis_state(q);
    const auto res = corollary_witness(*rho.decomposition(), 0);
    worst = std::max(worst, std::abs(res.margin - (1.0 / 3.0 - q1)));
    if ((res.verdict == Verdict::detected) == (q1 > 1.0 / 3.0)) ++matches;
  }
  rows.push_back({"detected iff q1 > 1/3 (21-point grid)", "21/21", std::to_string(matches) + "/21", "-",
                  matches == 21});
  rows.push_back(near("margin = 1/3 - q1 (max error)", "0", 0.0, worst, 1e-12));
  const std::array<double, 3> eq{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const DensityOperator rho_eq = reference::shifted_basis_state(eq);
  const auto res_eq = corollary_witness(*rho_eq.decomposition(), 0);
  rows.push_back(near("equal weights: Tr(W rho)", "0", 0.0, res_eq.margin, 1e-12));
  rows.push_back({"equal weights: verdict", "not-detected", to_string(res_eq.verdict), "1e-09",
                  res_eq.verdict == Verdict::not_detected});
  rows.push_back({"equal weights: PPT", "not-detected", to_string(ppt_check(rho_eq).verdict), "1e-09",
                  ppt_check(rho_eq).verdict == Verdict::not_detected});
  const auto special = special_witness(DensityOperator::pure(reference::shifted_maximally_entangled(3, 0)));
  rows.push_back(near("W = (1/3) I - rho_1: alpha", "1/3", 1.0 / 3.0, special.witness.alpha(), 1e-15));
  const Certification cert = certify(special.witness, cfg);
  rows.push_back(near("W = (1/3) I - rho_1: separable infimum", "0", 0.0, cert.infimum, 1e-4));
  return rows;
}

std::vector<ReproRow> reproduce_35(const OptimizerConfig& cfg) {
  std::vector<ReproRow> rows;
  const FeatureMap map(reference::cyclic_components());
  for (int i = 0; i < 3; ++i) {
    const auto m = seesaw_max(map.components()[i].matrix(), map.dims(), cfg);
    rows.push_back(near("max c_" + std::to_string(i + 1) + " over products", "1/3", 1.0 / 3.0, m.value, 1e-6));
  }
  struct Fixture {
    const char* name;
    std::array<double, 3> a, b, expected;
  };
  const double r3 = 1.0 / std::sqrt(3.0);
  const double r2 = 1.0 / std::sqrt(2.0);
  const Fixture fixtures[] = {
      {"D", {r3, r3, r3}, {r3, r3, r3}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 9.0}},
      {"E", {r2, r2, 0.0}, {r2, r2, 0.0}, {1.0 / 3.0, 1.0 / 12.0, 1.0 / 12.0}},
      {"F", {-0.707104, 0.672502, -0.218509}, {0.707107, -0.706824, -0.0199903}, {0.314261, 0.0367071, 0.0833943}},
      {"G", {0.876317, -0.0152726, 0.481493}, {0.481493, -0.0152726, 0.876317}, {0.237509, 0.0140176, 0.196609}},
  };
  for (const auto& fx : fixtures) {
    CVector a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a(i) = fx.a[i];
      b(i) = fx.b[i];
    }
    const RVector got = feature_vector(map, a, b);
    const RVector want = Eigen::Map<const RVector>(fx.expected.data(), 3);
    const double err = (got - want).cwiseAbs().maxCoeff();
    rows.push_back({std::string("fixture ") + fx.name, vec_str(want), vec_str(got), "1e-05", err <= 1e-5});
  }
  const auto plane = [&](double a, double b, double c3) {
    RVector f(3);
    f << a, b, c3;
    return check_plane(map, f, cfg);
  };
  rows.push_back(near("plane (1.5, 0.3, 3) separable max", "1", 1.0, plane(1.5, 0.3, 3).separable_max, 1e-4));
  rows.push_back(
      near("plane (1.71, 0.29, 3) separable max", "1.0174", 1.0174, plane(1.71, 0.29, 3).separable_max, 2e-3));
  {
    const double m = plane(3, -1, 3).separable_max;
    rows.push_back({"plane (3, -1, 3) separable max", ">= 13/12", g17(m), "1e-04", m >= 13.0 / 12.0 - 1e-4});
  }
  RVector f1(3), f2(3);
  f1 << 1.5, 0.3, 3.0;
  f2 << 0.3, 1.5, 3.0;
  const FiniteRankWitness w1 = plane_witness(map, f1);
  const FiniteRankWitness w2 = plane_witness(map, f2);
  std::mt19937_64 rng(cfg.seed);
  std::gamma_distribution<double> expo(1.0, 1.0);
  double err1 = 0.0, err2 = 0.0;
  for (int k = 0; k < 100; ++k) {
    double q[3] = {expo(rng), expo(rng), expo(rng)};
    const double s = q[0] + q[1] + q[2];
    for (double& x : q) x /= s;
    const DensityOperator rho = reference::cyclic_state(q[0], q[1], q[2]);
    err1 = std::max(err1, std::abs(evaluate(w1, rho) - (-0.5 * q[0] + 0.7 * q[1])));
    err2 = std::max(err2, std::abs(evaluate(w2, rho) - (0.7 * q[0] - 0.5 * q[1])));
  }
  rows.push_back(near("Tr(W1 rho) = -0.5 q1 + 0.7 q2 (max error)", "0", 0.0, err1, 1e-12));
  rows.push_back(near("Tr(W2 rho) = 0.7 q1 - 0.5 q2 (max error)", "0", 0.0, err2, 1e-12));

  int agree = 0, total = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const double q1 = (i + 0.5) / 50.0;
      const double q2 = (j + 0.5) / 50.0;
      const double q3 = 1.0 - q1 - q2;
      if (q3 < 0.0) continue;
      const auto cond = reference::cyclic_ppt_condition(q1, q2, q3, 1e-3);
      if (cond == reference::Condition::boundary) continue;
      ++total;
      const double lo = ppt_check(reference::cyclic_state(q1, q2, q3)).margin;
      if ((lo >= 0.0) == (cond == reference::Condition::holds)) ++agree;
    }
  rows.push_back({"PPT iff q1 q2 q3 >= q1^3 + q2^3 (grid)", std::to_string(total) + "/" + std::to_string(total),
                  std::to_string(agree) + "/" + std::to_string(total), "band 1e-3", agree == total});

  {
    const double q1 = 2.0 / 303.0;
    const double q2 = q1 / 2.0;
    const double norm = trace_norm(realign(reference::cyclic_state(q1, q2, 1.0 - q1 - q2)));
    rows.push_back({"||rho^R||_1 at q1 = 2/303, q2 = q1/2", "< 1", g17(norm), "strict", norm < 1.0});
  }
  const DensityOperator point = reference::cyclic_state(0.2, 0.1, 0.7);
  rows.push_back({"PPT at q = (0.2, 0.1, 0.7)", "not-detected", to_string(ppt_check(point).verdict), "1e-09",
                  ppt_check(point).verdict == Verdict::not_detected});
  rows.push_back(near("Tr(W1 rho) at q = (0.2, 0.1, 0.7)", "-0.03", -0.03, evaluate(w1, point), 1e-12));
  SearchConfig scfg;
  scfg.oracle = cfg;
  const SearchOutcome found = search(map, point, scfg);
  if (found.success()) {
    rows.push_back(near("searched witness: separable max", "1", 1.0, found.result->separable_max, 1e-4));
    rows.push_back({"searched witness: Tr(W rho)", "< -1e-3", g17(found.result->witness_value), "-",
                    found.result->witness_value < -1e-3});
  } else {
    rows.push_back({"searched witness", "success", "failed: " + found.failure, "-", false});
  }
  return rows;
}

}  // namespace

std::vector<ReproRow> reproduce(const std::string& example, const OptimizerConfig& cfg) {
  if (example == "3.3") return reproduce_33();
  if (example == "3.4") return reproduce_34(cfg);
  if (example == "3.5") return reproduce_35(cfg);
  throw ValidationError("unknown example '" + example + "' (expected 3.3, 3.4 or 3.5)");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement witness toolkit", "entwit"};
  app.require_subcommand(1);

  Common common;
  std::string state_path, witness_path, output, example;
  std::vector<std::string> states;
  bool special = false, corollary = false, hyperplane = false;
  int k0 = 1;
  double cert_tol = kCertTol;

  auto* check = app.add_subcommand("check", "run PPT, realignment and witness checks on a state file");
  check->add_option("state", state_path, "state file")->required();
  check->add_option("--witness", witness_path, "witness file to evaluate");
  check->add_option("--tol", common.tol, "reporting tolerance");
  check->add_option("--truncate", common.truncate, "terms kept per weighted-shift vector");
  check->add_flag("--json", common.json, "emit JSON");
  add_optimizer_flags(check, common);

  auto* witness = app.add_subcommand("witness", "construct, evaluate or certify witnesses");
  witness->require_subcommand(1);
  auto* construct = witness->add_subcommand("construct", "build a witness from a state file");
  construct->add_option("state", state_path, "state file")->required();
  auto* f_special = construct->add_flag("--special", special, "W = c I - rho");
  auto* f_corollary = construct->add_flag("--corollary", corollary, "W = ||D_k0||^2 I - |w_k0><w_k0|");
  auto* f_hyper = construct->add_flag("--hyperplane", hyperplane, "cutting-plane search over components");
  f_special->excludes(f_corollary)->excludes(f_hyper);
  f_corollary->excludes(f_hyper);
  construct->add_option("--k0", k0, "1-based term index for --corollary");
  construct->add_option("-o,--output", output, "witness file to write")->required();
  construct->add_option("--tol", common.tol, "reporting tolerance");
  add_optimizer_flags(construct, common);

  auto* eval = witness->add_subcommand("evaluate", "print Tr(W rho) for each state");
  eval->add_option("witness", witness_path, "witness file")->required();
  eval->add_option("states", states, "state files")->required();
  eval->add_option("--truncate", common.truncate, "terms kept per weighted-shift vector");
  eval->add_flag("--json", common.json, "emit JSON");

  auto* cert = witness->add_subcommand("certify", "attach a separable-infimum certificate");
  cert->add_option("witness", witness_path, "witness file")->required();
  cert->add_option("-o,--output", output, "file to write (stdout when omitted)");
  cert->add_option("--cert-tol", cert_tol, "certification tolerance");
  cert->add_option("--truncate", common.truncate, "truncation for weighted-shift witnesses");
  add_optimizer_flags(cert, common);

  auto* repro = app.add_subcommand("reproduce", "reproduce a worked example (3.3, 3.4, 3.5)");
  repro->add_option("example", example, "example id")->required();
  repro->add_flag("--json", common.json, "emit JSON");
  add_optimizer_flags(repro, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (check->parsed()) return cmd_check(state_path, witness_path, common, out);
    if (construct->parsed()) {
      if (!special && !corollary && !hyperplane) {
        err << "error: one of --special, --corollary, --hyperplane is required\n";
        return kInputError;
      }
      const std::string mode = special ? "special" : corollary ? "corollary" : "hyperplane";
      return cmd_construct(state_path, mode, k0, output, common, out, err);
    }
    if (eval->parsed()) return cmd_evaluate(witness_path, states, common, out);
    if (cert->parsed()) return cmd_certify(witness_path, output, cert_tol, common, out);
    if (repro->parsed()) return cmd_reproduce(example, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace entwit::cli
