#include "cpsor/dbn.hpp"

#include <cmath>
#include <limits>

namespace cpsor::dbn {
namespace {

void check_data(const DbnStructure& structure, const DiscreteData& data) {
  if (data.total_frames() == 0) throw DataError("empty data");
  if (data.n_nodes != structure.size()) throw DataError("data node count does not match structure");
  for (const auto& seq : data.sequences) {
    for (const auto& frame : seq) {
      if (frame.size() != structure.size()) throw DataError("frame width does not match structure");
      for (std::size_t i = 0; i < frame.size(); ++i) {
        if (frame[i] < 0 || frame[i] >= structure.nodes[i].cardinality) {
          throw DataError("state out of range for node " + structure.nodes[i].name);
        }
      }
    }
  }
}

Cpt empty_cpt(const DbnStructure& s, int child, std::vector<int> parents) {
  Cpt cpt;
  cpt.child = child;
  cpt.child_cardinality = s.nodes[static_cast<std::size_t>(child)].cardinality;
  for (int p : parents) cpt.parent_cardinalities.push_back(s.nodes[static_cast<std::size_t>(p)].cardinality);
  cpt.parents = std::move(parents);
  cpt.table.assign(cpt.rows() * static_cast<std::size_t>(cpt.child_cardinality), 0.0);
  return cpt;
}

void normalize_counts(Cpt& cpt, double alpha) {
  const auto card = static_cast<std::size_t>(cpt.child_cardinality);
  for (std::size_t r = 0; r < cpt.rows(); ++r) {
    double* row = cpt.table.data() + r * card;
    double total = 0.0;
    for (std::size_t k = 0; k < card; ++k) total += row[k];
    const double denom = total + alpha * static_cast<double>(card);
    for (std::size_t k = 0; k < card; ++k) {
      row[k] = denom > 0.0 ? (row[k] + alpha) / denom : 1.0 / static_cast<double>(card);
    }
  }
}

}  // namespace

DbnModel mle_fit(const DbnStructure& structure, const DiscreteData& data, double alpha) {
  structure.validate();
  check_data(structure, data);
  if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
  DbnModel model;
  model.structure = structure;
  model.sample_count = data.total_frames();
  const int n = static_cast<int>(structure.size());
  for (int i = 0; i < n; ++i) model.intra.push_back(empty_cpt(structure, i, structure.parents(i)));
  for (int i : structure.inter_edges) model.inter.emplace(i, empty_cpt(structure, i, {i}));

  for (const auto& seq : data.sequences) {
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const auto& frame = seq[t];
      for (auto& cpt : model.intra) {
        cpt.table[cpt.row_of(frame) * static_cast<std::size_t>(cpt.child_cardinality) +
                  static_cast<std::size_t>(frame[static_cast<std::size_t>(cpt.child)])] += 1.0;
      }
      if (t == 0) continue;
      for (auto& [node, cpt] : model.inter) {
        const auto prev = static_cast<std::size_t>(seq[t - 1][static_cast<std::size_t>(node)]);
        cpt.table[prev * static_cast<std::size_t>(cpt.child_cardinality) +
                  static_cast<std::size_t>(frame[static_cast<std::size_t>(node)])] += 1.0;
      }
    }
  }
  for (auto& cpt : model.intra) normalize_counts(cpt, alpha);
  for (auto& [node, cpt] : model.inter) normalize_counts(cpt, alpha);
  return model;
}

double log_likelihood(const DbnModel& model, const DiscreteData& data) {
  check_data(model.structure, data);
  double ll = 0.0;
  for (const auto& seq : data.sequences) {
    for (std::size_t t = 0; t < seq.size(); ++t) {
      for (const auto& cpt : model.intra) ll += std::log(cpt.probability(seq[t]));
      if (t == 0) continue;
      for (const auto& [node, cpt] : model.inter) {
        const auto prev = static_cast<std::size_t>(seq[t - 1][static_cast<std::size_t>(node)]);
        ll += std::log(cpt.row(prev)[static_cast<std::size_t>(seq[t][static_cast<std::size_t>(node)])]);
      }
    }
  }
  if (std::isnan(ll)) return -std::numeric_limits<double>::infinity();
  return ll;
}

std::string_view to_string(Penalty p) { return p == Penalty::Params ? "params" : "nodes"; }

std::size_t free_parameters(const DbnStructure& structure) {
  std::size_t total = 0;
  for (int i = 0; i < static_cast<int>(structure.size()); ++i) {
    std::size_t rows = 1;
    for (int p : structure.parents(i)) rows *= static_cast<std::size_t>(structure.nodes[static_cast<std::size_t>(p)].cardinality);
    total += rows * static_cast<std::size_t>(structure.nodes[static_cast<std::size_t>(i)].cardinality - 1);
  }
  for (int i : structure.inter_edges) {
    const auto card = static_cast<std::size_t>(structure.nodes[static_cast<std::size_t>(i)].cardinality);
    total += card * (card - 1);
  }
  return total;
}

double bic_score(const DbnModel& model, const DiscreteData& data, Penalty penalty) {
  const double ll = log_likelihood(model, data);
  const double m = static_cast<double>(data.total_frames());
  const double k = penalty == Penalty::Params ? static_cast<double>(free_parameters(model.structure))
                                              : static_cast<double>(model.structure.size());
  return ll - 0.5 * k * std::log(m);
}

}  // namespace cpsor::dbn
