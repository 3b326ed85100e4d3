#pragma once

// Brute-force references for the DBN engine: full joint enumeration and
// random model construction.

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cpsor/dbn.hpp"

namespace cpsor::test {

inline std::vector<double> random_row(std::mt19937_64& rng, int card) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> row(static_cast<std::size_t>(card));
  double sum = 0;
  for (auto& v : row) {
    v = g(rng) + 1e-3;
    sum += v;
  }
  for (auto& v : row) v /= sum;
  return row;
}

inline dbn::Cpt make_cpt(const dbn::DbnStructure& s, int child, std::mt19937_64& rng) {
  dbn::Cpt cpt;
  cpt.child = child;
  cpt.parents = s.parents(child);
  cpt.child_cardinality = s.nodes[child].cardinality;
  for (int p : cpt.parents) cpt.parent_cardinalities.push_back(s.nodes[p].cardinality);
  std::size_t rows = 1;
  for (int c : cpt.parent_cardinalities) rows *= static_cast<std::size_t>(c);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = random_row(rng, cpt.child_cardinality);
    cpt.table.insert(cpt.table.end(), row.begin(), row.end());
  }
  return cpt;
}

// Edges only go from lower to higher index, so the graph is acyclic.
inline dbn::DbnModel random_model(std::mt19937_64& rng, int n, int max_card, double edge_p, bool inter) {
  std::uniform_int_distribution<int> card(2, max_card);
  std::bernoulli_distribution edge(edge_p);
  dbn::DbnModel m;
  for (int i = 0; i < n; ++i) m.structure.nodes.push_back({"N" + std::to_string(i), card(rng), dbn::Layer::O});
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (edge(rng)) m.structure.intra_edges.insert({u, v});
    }
  }
  for (int i = 0; i < n; ++i) m.intra.push_back(make_cpt(m.structure, i, rng));
  if (inter) {
    for (int i = 0; i < n; ++i) {
      m.structure.inter_edges.insert(i);
      dbn::Cpt t;
      t.child = i;
      t.parents = {i};
      t.child_cardinality = m.structure.nodes[i].cardinality;
      t.parent_cardinalities = {t.child_cardinality};
      for (int r = 0; r < t.child_cardinality; ++r) {
        const auto row = random_row(rng, t.child_cardinality);
        t.table.insert(t.table.end(), row.begin(), row.end());
      }
      m.inter[i] = t;
    }
  }
  return m;
}

// Every full assignment with its slice-joint probability.
inline std::vector<std::pair<std::vector<int>, double>> enumerate_joint(const dbn::DbnModel& m) {
  const int n = static_cast<int>(m.structure.size());
  std::vector<std::pair<std::vector<int>, double>> out;
  std::vector<int> x(n, 0);
  while (true) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= m.intra[i].probability(x);
    out.emplace_back(x, p);
    int i = n - 1;
    while (i >= 0 && ++x[i] == m.structure.nodes[i].cardinality) x[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

inline std::vector<double> brute_conditional(const dbn::DbnModel& m, int query, const std::map<int, int>& evidence) {
  std::vector<double> out(m.structure.nodes[query].cardinality, 0.0);
  double total = 0.0;
  for (const auto& [x, p] : enumerate_joint(m)) {
    bool ok = true;
    for (const auto& [node, state] : evidence) ok = ok && x[node] == state;
    if (!ok) continue;
    out[x[query]] += p;
    total += p;
  }
  for (auto& v : out) v /= total;
  return out;
}

// Slice log-likelihood summed over frames plus transitions, from the CPT tables directly.
inline double brute_log_likelihood(const dbn::DbnModel& m, const dbn::DiscreteData& data) {
  double ll = 0.0;
  for (const auto& seq : data.sequences) {
    for (std::size_t t = 0; t < seq.size(); ++t) {
      for (std::size_t i = 0; i < m.structure.size(); ++i) ll += std::log(m.intra[i].probability(seq[t]));
      if (t == 0) continue;
      for (const auto& [node, cpt] : m.inter) {
        const int card = cpt.child_cardinality;
        ll += std::log(cpt.table[static_cast<std::size_t>(seq[t - 1][node] * card + seq[t][node])]);
      }
    }
  }
  return ll;
}

// All 25 DAGs over three nodes.
inline std::vector<std::set<dbn::Edge>> all_three_node_dags() {
  const dbn::Edge pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
  std::vector<std::set<dbn::Edge>> out;
  for (int code = 0; code < 27; ++code) {
    dbn::DbnStructure s;
    for (int i = 0; i < 3; ++i) s.nodes.push_back({"X" + std::to_string(i), 2, dbn::Layer::O});
    int c = code;
    for (const auto& [u, v] : pairs) {
      const int d = c % 3;
      c /= 3;
      if (d == 1) s.intra_edges.insert({u, v});
      if (d == 2) s.intra_edges.insert({v, u});
    }
    if (s.is_acyclic()) out.push_back(s.intra_edges);
  }
  return out;
}

}  // namespace cpsor::test
