#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpsor::dbn {

// Stimulus, Organism, Response.
enum class Layer : std::uint8_t { S, O, R };

std::string_view to_string(Layer layer);
Layer layer_from_string(std::string_view text);

// Layer rule: S->O, O->O, O->R, R->R.
bool sor_edge_allowed(Layer from, Layer to);

struct NodeSpec {
  std::string name;
  int cardinality = 2;
  Layer layer = Layer::O;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

using Edge = std::pair<int, int>;  // (from, to) node indices

struct DbnStructure {
  std::vector<NodeSpec> nodes;
  std::set<Edge> intra_edges;
  std::set<int> inter_edges;  // nodes carrying a node_{t-1} -> node_t edge

  std::size_t size() const { return nodes.size(); }
  int index_of(std::string_view name) const;
  std::vector<int> parents(int node) const;  // ascending
  bool is_acyclic() const;
  std::vector<int> topological_order() const;  // lowest index first among ready nodes
  bool respects_sor() const;
  // Throws std::invalid_argument describing the first violated invariant.
  void validate(bool require_sor = false) const;

  friend bool operator==(const DbnStructure&, const DbnStructure&) = default;
};

// Structural Hamming distance between intra edge sets (reversal counts once).
int structural_hamming_distance(const DbnStructure& a, const DbnStructure& b);

// Conditional probability table. Rows are indexed by the parent configuration
// in mixed radix, first parent most significant.
struct Cpt {
  int child = 0;
  std::vector<int> parents;
  int child_cardinality = 0;
  std::vector<int> parent_cardinalities;
  std::vector<double> table;  // rows() x child_cardinality

  std::size_t rows() const;
  std::size_t row_of(std::span<const int> frame) const;  // frame holds every node state
  std::span<const double> row(std::size_t r) const;
  double probability(std::span<const int> frame) const;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

struct DbnModel {
  DbnStructure structure;
  std::vector<Cpt> intra;       // one per node, in node order
  std::map<int, Cpt> inter;     // transition CPT P(x_t | x_{t-1}) per inter edge
  std::size_t sample_count = 0;  // training frames m

  friend bool operator==(const DbnModel&, const DbnModel&) = default;
};

// Sequences of discrete frames; each frame holds one state per node.
struct DiscreteData {
  std::size_t n_nodes = 0;
  std::vector<std::vector<std::vector<int>>> sequences;

  std::size_t total_frames() const;
};

class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row = (count + alpha) / (total + alpha * cardinality); with alpha = 0 unseen
// parent configurations get a uniform row. Inter CPTs are estimated from
// consecutive frame pairs.
DbnModel mle_fit(const DbnStructure& structure, const DiscreteData& data, double alpha = 0.0);

// Natural-log likelihood: intra terms for every frame plus inter terms for t >= 1.
// Returns -inf if any observed event has probability zero.
double log_likelihood(const DbnModel& model, const DiscreteData& data);

enum class Penalty { Params, Nodes };
std::string_view to_string(Penalty p);

// Sum over all CPTs of rows * (cardinality - 1).
std::size_t free_parameters(const DbnStructure& structure);

// log L - 0.5 * penalty * ln(m); higher is better.
double bic_score(const DbnModel& model, const DiscreteData& data, Penalty penalty = Penalty::Params);

enum class Prior { Sor, None };
enum class InterPolicy { AllSelf, None };

struct SearchOptions {
  Prior prior = Prior::Sor;
  Penalty penalty = Penalty::Params;
  std::uint64_t seed = 1;
  int restarts = 8;
  double alpha = 0.0;
  InterPolicy inter = InterPolicy::AllSelf;
  int max_parents = 4;
  double start_edge_probability = 0.15;
  std::size_t max_family_entries = 2'000'000;  // rows * cardinality cap per CPT
};

struct SearchResult {
  DbnModel model;
  double bic = 0.0;
  std::vector<double> restart_scores;
  std::vector<int> restart_steps;
};

// Greedy best-improvement search over intra edges with add/delete/reverse
// moves, best of `restarts` random legal starts.
SearchResult hill_climb(const std::vector<NodeSpec>& nodes, const DiscreteData& data,
                        const SearchOptions& options = {});

// Dense factor over ascending variable indices; first variable most significant.
struct Factor {
  std::vector<int> vars;
  std::vector<int> cards;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double at(std::span<const int> states) const;  // states aligned with vars
};

// Exact P(vars | evidence) within one slice by variable elimination.
// Throws std::domain_error("inconsistent evidence") on zero evidence mass.
Factor joint_marginal(const DbnModel& model, std::vector<int> vars,
                      const std::map<int, int>& evidence = {});

std::vector<double> infer_conditional(const DbnModel& model, int query,
                                      const std::map<int, int>& evidence);

std::vector<double> transition_query(const DbnModel& model, int node, int prev_state);

// Ancestral sampling; for t >= 1 a node with an inter edge draws from the
// normalized product of its intra row and transition row.
std::vector<std::vector<int>> sample(const DbnModel& model, std::size_t horizon, std::uint64_t seed);

// As sample(), but clamp[t][i] >= 0 fixes node i at step t.
std::vector<std::vector<int>> sample_clamped(const DbnModel& model,
                                             const std::vector<std::vector<int>>& clamp,
                                             std::uint64_t seed);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDocumentSchemaVersion = 1;

std::string serialize(const DbnModel& model);
DbnModel deserialize(const std::string& text);
std::string serialize_structure(const DbnStructure& structure);
DbnStructure parse_structure(const std::string& text);

}  // namespace cpsor::dbn
