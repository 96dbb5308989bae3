#include "entwit/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace entwit::io {

using nlohmann::json;

ParseError::ParseError(std::string field, int line, const std::string& message)
    : Error(field + " (line " + std::to_string(line) + "): " + message), field_(std::move(field)), line_(line) {}

namespace {

// Minimal scanner over already-validated JSON that records where each value starts.
class LineScanner {
 public:
  explicit LineScanner(const std::string& text) : s_(text) {}

  std::vector<std::pair<std::string, int>> run() {
    skip_ws();
    value("");
    return std::move(out_);
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (s_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') {
        ++pos_;
        // keys with escapes are rare; keep the escaped char verbatim
      }
      out.push_back(s_[pos_]);
      ++pos_;
    }
    ++pos_;
    return out;
  }

  void value(const std::string& path) {
    out_.emplace_back(path, line_);
    if (pos_ >= s_.size()) return;
    const char c = s_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (pos_ < s_.size() && s_[pos_] != '}') {
        const std::string key = string_token();
        skip_ws();
        ++pos_;  // colon
        skip_ws();
        value(path + "/" + key);
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      int idx = 0;
      while (pos_ < s_.size() && s_[pos_] != ']') {
        value(path + "/" + std::to_string(idx++));
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ',' &&
             s_[pos_] != ']' && s_[pos_] != '}') {
        ++pos_;
      }
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::vector<std::pair<std::string, int>> out_;
};

class Doc {
 public:
  explicit Doc(const std::string& text) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      int line = 1;
      for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
        if (text[i] == '\n') ++line;
      throw ParseError("<document>", line, "invalid JSON");
    }
    for (auto& [p, l] : value_lines(text)) lines_[p] = l;
  }

  const json& root() const { return root_; }

  int line_of(std::string ptr) const {
    while (true) {
      if (auto it = lines_.find(ptr); it != lines_.end()) return it->second;
      if (ptr.empty()) return 1;
      ptr = ptr.substr(0, ptr.rfind('/'));
    }
  }

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    throw ParseError(ptr.empty() ? "<document>" : ptr.substr(1), line_of(ptr), msg);
  }

  const json& at(const std::string& ptr) const {
    const json::json_pointer jp(ptr);
    if (!root_.contains(jp)) fail(ptr, "missing field");
    return root_.at(jp);
  }

  bool has(const std::string& ptr) const { return root_.contains(json::json_pointer(ptr)); }

  double number(const std::string& ptr) const {
    const json& v = at(ptr);
    if (!v.is_number()) fail(ptr, "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& ptr) const {
    const json& v = at(ptr);
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& ptr) const {
    const json& v = at(ptr);
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  std::size_t array_size(const std::string& ptr) const {
    const json& v = at(ptr);
    if (!v.is_array()) fail(ptr, "expected an array");
    return v.size();
  }

  Complex complex(const std::string& ptr) const {
    const json& v = at(ptr);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(ptr, "expected [re, im]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  Dims dims(const std::string& ptr) const {
    if (array_size(ptr) != 2) fail(ptr, "expected [dim_a, dim_b]");
    const Dims d{integer(ptr + "/0"), integer(ptr + "/1")};
    if (d.a < 1 || d.b < 1) fail(ptr, "dimensions must be positive");
    return d;
  }

  CVector coeffs(const std::string& ptr, const Dims& d) const {
    const std::size_t n = array_size(ptr);
    if (n != static_cast<std::size_t>(d.total())) {
      fail(ptr, "expected " + std::to_string(d.total()) + " coefficients, got " + std::to_string(n));
    }
    CVector v(d.total());
    for (int k = 0; k < d.total(); ++k) v(k) = complex(ptr + "/" + std::to_string(k));
    return v;
  }

 private:
  json root_;
  std::map<std::string, int> lines_;
};

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json coeffs_json(const BipartiteVector& v) {
  json arr = json::array();
  const CVector flat = v.flatten();
  for (Eigen::Index k = 0; k < flat.size(); ++k) arr.push_back(complex_json(flat(k)));
  return arr;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::vector<std::pair<std::string, int>> value_lines(const std::string& text) {
  return LineScanner(text).run();
}

std::string family_name(const SequenceVector& v) {
  if (v.family() == WeightFamily::inverse_linear) return "inverse-linear";
  std::ostringstream os;
  os.precision(17);
  os << "geometric(" << v.ratio() << ")";
  return os.str();
}

SequenceVector parse_family(const std::string& name, int shift) {
  if (name == "inverse-linear") return SequenceVector::inverse_linear(shift);
  const std::string prefix = "geometric(";
  if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size() + 1 && name.back() == ')') {
    const std::string inner = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == inner.size()) return SequenceVector::geometric(r, shift);
  }
  throw ValidationError("unknown weight family '" + name + "'");
}

StateFile parse_state(const std::string& text, double tol) {
  const Doc doc(text);
  if (!doc.root().is_object()) doc.fail("", "expected a JSON object");
  const std::string kind = doc.string("/kind");
  StateFile out;

  if (kind == "mixture") {
    out.kind = StateKind::mixture;
    const Dims d = doc.dims("/dims");
    const std::size_t n = doc.array_size("/terms");
    if (n == 0) doc.fail("/terms", "mixture has no terms");
    std::vector<MixtureTerm> terms;
    for (std::size_t k = 0; k < n; ++k) {
      const std::string p = "/terms/" + std::to_string(k);
      const double w = doc.number(p + "/weight");
      const CVector c = doc.coeffs(p + "/coeffs", d);
      terms.push_back({w, BipartiteVector::from_flat(d, c)});
      out.component_labels.push_back(doc.has(p + "/component") ? doc.integer(p + "/component")
                                                                : static_cast<int>(k));
    }
    try {
      out.state = DensityOperator::from_mixture(terms, tol);
    } catch (const ValidationError& e) {
      doc.fail("/terms", e.what());
    }
  } else if (kind == "dense") {
    out.kind = StateKind::dense;
    const Dims d = doc.dims("/dims");
    if (doc.array_size("/matrix") != static_cast<std::size_t>(d.total())) {
      doc.fail("/matrix", "expected " + std::to_string(d.total()) + " rows");
    }
    CMatrix m(d.total(), d.total());
    for (int r = 0; r < d.total(); ++r) {
      const std::string row = "/matrix/" + std::to_string(r);
      if (doc.array_size(row) != static_cast<std::size_t>(d.total())) {
        doc.fail(row, "expected " + std::to_string(d.total()) + " entries");
      }
      for (int c = 0; c < d.total(); ++c) m(r, c) = doc.complex(row + "/" + std::to_string(c));
    }
    try {
      out.state = DensityOperator::validated(d, std::move(m), tol);
    } catch (const ValidationError& e) {
      doc.fail("/matrix", e.what());
    }
  } else if (kind == "sequence-mixture") {
    out.kind = StateKind::sequence_mixture;
    const std::size_t n = doc.array_size("/terms");
    std::vector<SequenceTerm> terms;
    for (std::size_t k = 0; k < n; ++k) {
      const std::string p = "/terms/" + std::to_string(k);
      const double w = doc.number(p + "/weight");
      const int shift = doc.has(p + "/shift") ? doc.integer(p + "/shift") : 0;
      try {
        terms.push_back({w, parse_family(doc.string(p + "/family"), shift)});
      } catch (const ValidationError& e) {
        doc.fail(p + "/family", e.what());
      }
      out.component_labels.push_back(static_cast<int>(k));
    }
    try {
      out.sequence = SequenceMixture::validated(std::move(terms), tol);
    } catch (const ValidationError& e) {
      doc.fail("/terms", e.what());
    }
  } else {
    doc.fail("/kind", "unknown state kind '" + kind + "'");
  }
  return out;
}

StateFile load_state(const std::filesystem::path& path, double tol) { return parse_state(read_file(path), tol); }

AnyWitness parse_witness(const std::string& text) {
  const Doc doc(text);
  if (!doc.root().is_object()) doc.fail("", "expected a JSON object");
  const double alpha = doc.number("/alpha");
  const std::size_t n = doc.array_size("/terms");
  const bool sequence = doc.has("/kind") && doc.string("/kind") == "sequence";

  std::optional<Certification> cert;
  if (doc.has("/certification")) {
    Certification c;
    c.infimum = doc.number("/certification/infimum");
    c.method = doc.string("/certification/method");
    c.restarts = doc.integer("/certification/restarts");
    c.tolerance = doc.number("/certification/tolerance");
    c.seed = doc.has("/certification/seed") ? doc.at("/certification/seed").get<std::uint64_t>() : 0;
    const json& flag = doc.at("/certification/certified");
    if (!flag.is_boolean()) doc.fail("/certification/certified", "expected a boolean");
    c.certified = flag.get<bool>();
    cert = c;
  }

  if (sequence) {
    std::vector<SequenceWitnessTerm> terms;
    for (std::size_t k = 0; k < n; ++k) {
      const std::string p = "/terms/" + std::to_string(k);
      const double lambda = doc.number(p + "/lambda");
      const int shift = doc.has(p + "/shift") ? doc.integer(p + "/shift") : 0;
      try {
        terms.push_back({lambda, parse_family(doc.string(p + "/family"), shift)});
      } catch (const ValidationError& e) {
        doc.fail(p + "/family", e.what());
      }
    }
    try {
      return SequenceWitness(alpha, std::move(terms));
    } catch (const ValidationError& e) {
      doc.fail("/terms", e.what());
    }
  }

  const Dims d = doc.dims("/dims");
  std::vector<WitnessTerm> terms;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string p = "/terms/" + std::to_string(k);
    terms.push_back({doc.number(p + "/lambda"), BipartiteVector::from_flat(d, doc.coeffs(p + "/coeffs", d))});
  }
  try {
    FiniteRankWitness w(d, alpha, std::move(terms));
    if (cert) w = w.with_certification(*cert);
    return w;
  } catch (const Error& e) {
    doc.fail("/terms", e.what());
  }
}

AnyWitness load_witness(const std::filesystem::path& path) { return parse_witness(read_file(path)); }

json to_json(const Certification& c) {
  return {{"infimum", c.infimum}, {"method", c.method},   {"restarts", c.restarts},
          {"tolerance", c.tolerance}, {"seed", c.seed}, {"certified", c.certified}};
}

json to_json(const FiniteRankWitness& w) {
  json terms = json::array();
  for (const auto& t : w.terms()) terms.push_back({{"lambda", t.lambda}, {"coeffs", coeffs_json(t.omega)}});
  json j = {{"alpha", w.alpha()}, {"dims", {w.dims().a, w.dims().b}}, {"terms", terms}};
  if (w.certification()) j["certification"] = to_json(*w.certification());
  return j;
}

json to_json(const SequenceWitness& w) {
  json terms = json::array();
  for (const auto& t : w.terms()) {
    terms.push_back({{"lambda", t.lambda}, {"family", family_name(t.omega)}, {"shift", t.omega.shift()}});
  }
  return {{"kind", "sequence"}, {"alpha", w.alpha()}, {"terms", terms}};
}

json to_json(const AnyWitness& w) {
  return std::visit([](const auto& x) { return to_json(x); }, w);
}

json to_json(const CriterionReport& r) {
  json config = json::object();
  for (const auto& [k, v] : r.metadata) config[k] = v;
  return {{"criterion", r.criterion},
          {"verdict", to_string(r.verdict)},
          {"margin", r.margin},
          {"tolerance", r.tolerance},
          {"config", config}};
}

json state_to_json(const std::vector<MixtureTerm>& terms, const std::vector<int>& labels) {
  json arr = json::array();
  for (std::size_t k = 0; k < terms.size(); ++k) {
    json t = {{"weight", terms[k].weight}, {"coeffs", coeffs_json(terms[k].vector)}};
    if (k < labels.size()) t["component"] = labels[k];
    arr.push_back(t);
  }
  const Dims d = terms.front().vector.dims();
  return {{"kind", "mixture"}, {"dims", {d.a, d.b}}, {"terms", arr}};
}

json state_to_json(const DensityOperator& rho) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < rho.matrix().rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < rho.matrix().cols(); ++c) row.push_back(complex_json(rho.matrix()(r, c)));
    rows.push_back(row);
  }
  return {{"kind", "dense"}, {"dims", {rho.dims().a, rho.dims().b}}, {"matrix", rows}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace entwit::io
