#pragma once

// JSON state and witness files.
//
// State file (UTF-8 JSON), complex numbers as [re, im]:
//   {"kind": "mixture", "dims": [da, db],
//    "terms": [{"weight": p, "coeffs": [[re, im], ...], "component": c}, ...]}
//     coeffs are row-major over |ij> (length da*db); "component" is an
//     optional integer grouping terms into feature-map components.
//   {"kind": "dense", "dims": [da, db], "matrix": [[[re, im], ...], ...]}
//   {"kind": "sequence-mixture",
//    "terms": [{"weight": p, "family": "inverse-linear" | "geometric(r)", "shift": s}, ...]}
//
// Witness file:
//   {"alpha": a, "dims": [da, db], "terms": [{"lambda": l, "coeffs": [...]}, ...],
//    "certification": {"infimum", "method", "restarts", "tolerance", "seed", "certified"}}
//   or, for weighted-shift vectors, "kind": "sequence" with terms
//   {"lambda": l, "family": ..., "shift": s} and no dims.

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "entwit/bipartite.hpp"
#include "entwit/criteria.hpp"
#include "entwit/error.hpp"
#include "entwit/witness.hpp"

namespace entwit::io {

/// Malformed or schema-invalid input; names the JSON field and its line.
class ParseError : public Error {
 public:
  ParseError(std::string field, int line, const std::string& message);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

enum class StateKind { mixture, dense, sequence_mixture };

struct StateFile {
  StateKind kind = StateKind::mixture;
  std::optional<DensityOperator> state;
  std::optional<SequenceMixture> sequence;
  /// One label per mixture term; defaults to the term index.
  std::vector<int> component_labels;
};

using AnyWitness = std::variant<FiniteRankWitness, SequenceWitness>;

StateFile parse_state(const std::string& text, double tol = kInputTol);
StateFile load_state(const std::filesystem::path& path, double tol = kInputTol);

AnyWitness parse_witness(const std::string& text);
AnyWitness load_witness(const std::filesystem::path& path);

nlohmann::json to_json(const FiniteRankWitness& w);
nlohmann::json to_json(const SequenceWitness& w);
nlohmann::json to_json(const AnyWitness& w);
nlohmann::json to_json(const Certification& c);
nlohmann::json to_json(const CriterionReport& r);
nlohmann::json state_to_json(const std::vector<MixtureTerm>& terms, const std::vector<int>& labels = {});
nlohmann::json state_to_json(const DensityOperator& rho);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Line (1-based) of the value at every JSON pointer in `text`, which must be valid JSON.
std::vector<std::pair<std::string, int>> value_lines(const std::string& text);

std::string family_name(const SequenceVector& v);
SequenceVector parse_family(const std::string& name, int shift);

}  // namespace entwit::io
