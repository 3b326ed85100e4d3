#include "cpsor/dbn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cpsor::dbn {
namespace {

// Frames flattened to one row-major block.
struct FrameBlock {
  std::size_t n_nodes = 0;
  std::size_t n_frames = 0;
  std::vector<int> states;

  int at(std::size_t frame, int node) const {
    return states[frame * n_nodes + static_cast<std::size_t>(node)];
  }
};

FrameBlock flatten(const DiscreteData& data) {
  FrameBlock block;
  block.n_nodes = data.n_nodes;
  for (const auto& seq : data.sequences) {
    for (const auto& frame : seq) block.states.insert(block.states.end(), frame.begin(), frame.end());
  }
  block.n_frames = data.total_frames();
  return block;
}

class FamilyScorer {
 public:
  FamilyScorer(const std::vector<NodeSpec>& nodes, const FrameBlock& block, const SearchOptions& options)
      : nodes_(nodes), block_(block), options_(options),
        log_m_(std::log(static_cast<double>(block.n_frames))) {}

  std::size_t entries(int child, const std::vector<int>& parents) const {
    std::size_t rows = 1;
    for (int p : parents) rows *= static_cast<std::size_t>(nodes_[static_cast<std::size_t>(p)].cardinality);
    return rows * static_cast<std::size_t>(nodes_[static_cast<std::size_t>(child)].cardinality);
  }

  // Log-likelihood contribution of the family minus its share of the penalty.
  double score(int child, const std::vector<int>& parents) {
    auto key = std::make_pair(child, parents);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto card = static_cast<std::size_t>(nodes_[static_cast<std::size_t>(child)].cardinality);
    keys_.resize(block_.n_frames);
    for (std::size_t f = 0; f < block_.n_frames; ++f) {
      std::size_t row = 0;
      for (int p : parents) {
        row = row * static_cast<std::size_t>(nodes_[static_cast<std::size_t>(p)].cardinality) +
              static_cast<std::size_t>(block_.at(f, p));
      }
      keys_[f] = row * card + static_cast<std::size_t>(block_.at(f, child));
    }
    std::sort(keys_.begin(), keys_.end());
    const double alpha = options_.alpha;
    double ll = 0.0;
    std::size_t i = 0;
    while (i < keys_.size()) {
      const std::size_t row = keys_[i] / card;
      std::size_t row_end = i;
      while (row_end < keys_.size() && keys_[row_end] / card == row) ++row_end;
      const double denom = static_cast<double>(row_end - i) + alpha * static_cast<double>(card);
      std::size_t j = i;
      while (j < row_end) {
        std::size_t k = j;
        while (k < row_end && keys_[k] == keys_[j]) ++k;
        const double n = static_cast<double>(k - j);
        ll += n * std::log((n + alpha) / denom);
        j = k;
      }
      i = row_end;
    }
    if (options_.penalty == Penalty::Params) {
      const double free = static_cast<double>(entries(child, parents) / card * (card - 1));
      ll -= 0.5 * free * log_m_;
    }
    cache_.emplace(std::move(key), ll);
    return ll;
  }

 private:
  const std::vector<NodeSpec>& nodes_;
  const FrameBlock& block_;
  const SearchOptions& options_;
  double log_m_;
  std::map<std::pair<int, std::vector<int>>, double> cache_;
  std::vector<std::size_t> keys_;
};

class Graph {
 public:
  explicit Graph(std::size_t n) : n_(n), adj_(n * n, false) {}

  bool has(int u, int v) const { return adj_[idx(u, v)]; }
  void set(int u, int v, bool on) { adj_[idx(u, v)] = on; }

  std::vector<int> parents(int v) const {
    std::vector<int> out;
    for (std::size_t u = 0; u < n_; ++u) {
      if (adj_[u * n_ + static_cast<std::size_t>(v)]) out.push_back(static_cast<int>(u));
    }
    return out;
  }

  // True if `to` is reachable from `from`, ignoring the single edge `skip`.
  bool reaches(int from, int to, Edge skip = {-1, -1}) const {
    std::vector<bool> seen(n_, false);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      for (std::size_t w = 0; w < n_; ++w) {
        if (!adj_[static_cast<std::size_t>(u) * n_ + w] || seen[w]) continue;
        if (u == skip.first && static_cast<int>(w) == skip.second) continue;
        seen[w] = true;
        stack.push_back(static_cast<int>(w));
      }
    }
    return false;
  }

  std::set<Edge> edges() const {
    std::set<Edge> out;
    for (std::size_t u = 0; u < n_; ++u) {
      for (std::size_t v = 0; v < n_; ++v) {
        if (adj_[u * n_ + v]) out.emplace(static_cast<int>(u), static_cast<int>(v));
      }
    }
    return out;
  }

 private:
  std::size_t idx(int u, int v) const {
    return static_cast<std::size_t>(u) * n_ + static_cast<std::size_t>(v);
  }
  std::size_t n_;
  std::vector<bool> adj_;
};

std::vector<int> with(std::vector<int> parents, int u) {
  parents.insert(std::lower_bound(parents.begin(), parents.end(), u), u);
  return parents;
}

std::vector<int> without(std::vector<int> parents, int u) {
  parents.erase(std::find(parents.begin(), parents.end(), u));
  return parents;
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SearchResult hill_climb(const std::vector<NodeSpec>& nodes, const DiscreteData& data,
                        const SearchOptions& options) {
  if (nodes.empty()) throw std::invalid_argument("no nodes");
  if (options.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  DbnStructure base;
  base.nodes = nodes;
  if (options.inter == InterPolicy::AllSelf) {
    for (std::size_t i = 0; i < nodes.size(); ++i) base.inter_edges.insert(static_cast<int>(i));
  }
  // Validates node specs and data before the search touches them.
  (void)mle_fit(base, data, options.alpha);

  const FrameBlock block = flatten(data);
  FamilyScorer scorer(nodes, block, options);
  const int n = static_cast<int>(nodes.size());

  auto legal_pair = [&](int u, int v) {
    if (u == v) return false;
    if (options.prior == Prior::None) return true;
    return sor_edge_allowed(nodes[static_cast<std::size_t>(u)].layer, nodes[static_cast<std::size_t>(v)].layer);
  };
  auto family_ok = [&](int child, const std::vector<int>& parents) {
    return static_cast<int>(parents.size()) <= options.max_parents &&
           scorer.entries(child, parents) <= options.max_family_entries;
  };

  SearchResult result;
  result.bic = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    Graph g(nodes.size());
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        if (!legal_pair(u, v)) continue;
        if (unit_draw(rng) >= options.start_edge_probability) continue;
        if (g.has(v, u) || g.reaches(v, u) || !family_ok(v, with(g.parents(v), u))) continue;
        g.set(u, v, true);
      }
    }

    int steps = 0;
    while (true) {
      enum Kind { Add, Delete, Reverse };
      double best_delta = 1e-9;
      int best_kind = -1, best_u = -1, best_v = -1;
      auto consider = [&](int kind, int u, int v, double delta) {
        if (delta > best_delta) {
          best_delta = delta;
          best_kind = kind;
          best_u = u;
          best_v = v;
        }
      };
      for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
          if (!legal_pair(u, v) || g.has(u, v) || g.has(v, u) || g.reaches(v, u)) continue;
          const auto pv = g.parents(v);
          const auto next = with(pv, u);
          if (!family_ok(v, next)) continue;
          consider(Add, u, v, scorer.score(v, next) - scorer.score(v, pv));
        }
      }
      for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
          if (!g.has(u, v)) continue;
          const auto pv = g.parents(v);
          consider(Delete, u, v, scorer.score(v, without(pv, u)) - scorer.score(v, pv));
        }
      }
      for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
          if (!g.has(u, v) || !legal_pair(v, u) || g.reaches(u, v, {u, v})) continue;
          const auto pv = g.parents(v);
          const auto pu = g.parents(u);
          const auto pu_next = with(pu, v);
          if (!family_ok(u, pu_next)) continue;
          consider(Reverse, u, v,
                   scorer.score(v, without(pv, u)) - scorer.score(v, pv) + scorer.score(u, pu_next) -
                       scorer.score(u, pu));
        }
      }
      if (best_kind < 0) break;
      if (best_kind == Add) {
        g.set(best_u, best_v, true);
      } else if (best_kind == Delete) {
        g.set(best_u, best_v, false);
      } else {
        g.set(best_u, best_v, false);
        g.set(best_v, best_u, true);
      }
      ++steps;
    }

    DbnStructure s = base;
    s.intra_edges = g.edges();
    DbnModel model = mle_fit(s, data, options.alpha);
    const double bic = bic_score(model, data, options.penalty);
    result.restart_scores.push_back(bic);
    result.restart_steps.push_back(steps);
    if (bic > result.bic) {
      result.bic = bic;
      result.model = std::move(model);
    }
  }
  return result;
}

}  // namespace cpsor::dbn
