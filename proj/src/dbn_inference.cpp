#include "cpsor/dbn.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace cpsor::dbn {
namespace {

std::vector<std::size_t> strides_of(const std::vector<int>& cards) {
  std::vector<std::size_t> strides(cards.size(), 1);
  for (std::size_t i = cards.size(); i-- > 1;) strides[i - 1] = strides[i] * static_cast<std::size_t>(cards[i]);
  return strides;
}

// Stride of each `out` variable inside factor `f` (0 when absent).
std::vector<std::size_t> aligned_strides(const Factor& f, const std::vector<int>& out) {
  const auto own = strides_of(f.cards);
  std::vector<std::size_t> result(out.size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto it = std::find(f.vars.begin(), f.vars.end(), out[i]);
    if (it != f.vars.end()) result[i] = own[static_cast<std::size_t>(it - f.vars.begin())];
  }
  return result;
}

std::size_t total_size(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(out.vars));
  for (int v : out.vars) {
    auto ia = std::find(a.vars.begin(), a.vars.end(), v);
    out.cards.push_back(ia != a.vars.end() ? a.cards[static_cast<std::size_t>(ia - a.vars.begin())]
                                           : b.cards[static_cast<std::size_t>(
                                                 std::find(b.vars.begin(), b.vars.end(), v) - b.vars.begin())]);
  }
  out.values.assign(total_size(out.cards), 0.0);
  const auto sa = aligned_strides(a, out.vars);
  const auto sb = aligned_strides(b, out.vars);
  std::vector<int> state(out.vars.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = a.values[ia] * b.values[ib];
    for (std::size_t d = out.vars.size(); d-- > 0;) {
      if (++state[d] < out.cards[d]) {
        ia += sa[d];
        ib += sb[d];
        break;
      }
      state[d] = 0;
      ia -= sa[d] * static_cast<std::size_t>(out.cards[d] - 1);
      ib -= sb[d] * static_cast<std::size_t>(out.cards[d] - 1);
    }
  }
  return out;
}

// Sums out variable at position `pos`, or keeps only `keep_state` when >= 0.
Factor collapse(const Factor& f, std::size_t pos, int keep_state) {
  Factor out;
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    if (i == pos) continue;
    out.vars.push_back(f.vars[i]);
    out.cards.push_back(f.cards[i]);
  }
  out.values.assign(total_size(out.cards), 0.0);
  const auto strides = strides_of(f.cards);
  const std::size_t inner = strides[pos];
  const auto card = static_cast<std::size_t>(f.cards[pos]);
  const std::size_t outer = f.values.size() / (inner * card);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < card; ++s) {
      if (keep_state >= 0 && s != static_cast<std::size_t>(keep_state)) continue;
      const double* src = f.values.data() + (o * card + s) * inner;
      double* dst = out.values.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  return out;
}

Factor cpt_factor(const Cpt& cpt) {
  // CPT layout is (parents..., child) which is already mixed radix; reorder to ascending vars.
  Factor raw;
  raw.vars = cpt.parents;
  raw.vars.push_back(cpt.child);
  raw.cards = cpt.parent_cardinalities;
  raw.cards.push_back(cpt.child_cardinality);
  raw.values = cpt.table;
  if (std::is_sorted(raw.vars.begin(), raw.vars.end())) return raw;
  Factor out;
  out.vars = raw.vars;
  std::sort(out.vars.begin(), out.vars.end());
  for (int v : out.vars) {
    out.cards.push_back(raw.cards[static_cast<std::size_t>(std::find(raw.vars.begin(), raw.vars.end(), v) - raw.vars.begin())]);
  }
  out.values.assign(raw.values.size(), 0.0);
  const auto src_strides = aligned_strides(raw, out.vars);
  std::vector<int> state(out.vars.size(), 0);
  std::size_t src = 0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = raw.values[src];
    for (std::size_t d = out.vars.size(); d-- > 0;) {
      if (++state[d] < out.cards[d]) {
        src += src_strides[d];
        break;
      }
      state[d] = 0;
      src -= src_strides[d] * static_cast<std::size_t>(out.cards[d] - 1);
    }
  }
  return out;
}

void check_state(const DbnModel& model, int node, int state) {
  if (node < 0 || node >= static_cast<int>(model.structure.size())) throw std::invalid_argument("node index out of range");
  if (state < 0 || state >= model.structure.nodes[static_cast<std::size_t>(node)].cardinality) {
    throw std::invalid_argument("state out of range for node " + model.structure.nodes[static_cast<std::size_t>(node)].name);
  }
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int draw(std::mt19937_64& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = unit_draw(rng) * total;
  double acc = 0.0;
  int last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last = static_cast<int>(k);
    acc += weights[k];
    if (u < acc) return last;
  }
  return last;
}

}  // namespace

double Factor::at(std::span<const int> states) const {
  if (states.size() != vars.size()) throw std::invalid_argument("state count does not match factor");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(states[i]);
  return values[idx];
}

Factor joint_marginal(const DbnModel& model, std::vector<int> vars, const std::map<int, int>& evidence) {
  const auto& s = model.structure;
  const int n = static_cast<int>(s.size());
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  for (int v : vars) {
    if (v < 0 || v >= n) throw std::invalid_argument("query node out of range");
    if (evidence.count(v) != 0) throw std::invalid_argument("query node is also evidence");
  }
  for (const auto& [node, state] : evidence) check_state(model, node, state);

  // Nodes outside the ancestral closure of query and evidence sum out to 1.
  std::vector<bool> relevant(static_cast<std::size_t>(n), false);
  std::vector<int> stack(vars.begin(), vars.end());
  for (const auto& [node, state] : evidence) stack.push_back(node);
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (relevant[static_cast<std::size_t>(v)]) continue;
    relevant[static_cast<std::size_t>(v)] = true;
    for (int p : model.intra[static_cast<std::size_t>(v)].parents) stack.push_back(p);
  }

  std::vector<Factor> factors;
  for (int v = 0; v < n; ++v) {
    if (!relevant[static_cast<std::size_t>(v)]) continue;
    Factor f = cpt_factor(model.intra[static_cast<std::size_t>(v)]);
    for (const auto& [node, state] : evidence) {
      auto it = std::find(f.vars.begin(), f.vars.end(), node);
      if (it != f.vars.end()) f = collapse(f, static_cast<std::size_t>(it - f.vars.begin()), state);
    }
    factors.push_back(std::move(f));
  }

  std::vector<int> hidden;
  for (int v = 0; v < n; ++v) {
    if (relevant[static_cast<std::size_t>(v)] && evidence.count(v) == 0 &&
        !std::binary_search(vars.begin(), vars.end(), v)) {
      hidden.push_back(v);
    }
  }
  // Greedy elimination: smallest resulting factor first, lowest index on ties.
  while (!hidden.empty()) {
    std::size_t best_pos = 0;
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    for (std::size_t h = 0; h < hidden.size(); ++h) {
      std::map<int, int> cards;
      for (const auto& f : factors) {
        if (std::find(f.vars.begin(), f.vars.end(), hidden[h]) == f.vars.end()) continue;
        for (std::size_t i = 0; i < f.vars.size(); ++i) cards[f.vars[i]] = f.cards[i];
      }
      std::size_t cost = 1;
      for (const auto& [v, c] : cards) cost *= static_cast<std::size_t>(c);
      if (cost < best_cost) {
        best_cost = cost;
        best_pos = h;
      }
    }
    const int var = hidden[best_pos];
    hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(best_pos));
    Factor product{{}, {}, {1.0}};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), var) != f.vars.end()) {
        product = multiply(product, f);
      } else {
        rest.push_back(std::move(f));
      }
    }
    const auto pos = static_cast<std::size_t>(std::find(product.vars.begin(), product.vars.end(), var) - product.vars.begin());
    rest.push_back(collapse(product, pos, -1));
    factors = std::move(rest);
  }

  Factor result{{}, {}, {1.0}};
  for (const auto& f : factors) result = multiply(result, f);
  // Query nodes cut off by barren pruning cannot occur: they are relevant by construction.
  double total = 0.0;
  for (double v : result.values) total += v;
  if (!(total > 0.0)) throw std::domain_error("inconsistent evidence");
  for (double& v : result.values) v /= total;
  return result;
}

std::vector<double> infer_conditional(const DbnModel& model, int query, const std::map<int, int>& evidence) {
  return joint_marginal(model, {query}, evidence).values;
}

std::vector<double> transition_query(const DbnModel& model, int node, int prev_state) {
  auto it = model.inter.find(node);
  if (it == model.inter.end()) throw std::invalid_argument("node has no inter-slice edge");
  check_state(model, node, prev_state);
  const auto row = it->second.row(static_cast<std::size_t>(prev_state));
  return {row.begin(), row.end()};
}

std::vector<std::vector<int>> sample(const DbnModel& model, std::size_t horizon, std::uint64_t seed) {
  return sample_clamped(model, std::vector<std::vector<int>>(horizon, std::vector<int>(model.structure.size(), -1)),
                        seed);
}

std::vector<std::vector<int>> sample_clamped(const DbnModel& model, const std::vector<std::vector<int>>& clamp,
                                             std::uint64_t seed) {
  const auto& s = model.structure;
  const auto order = s.topological_order();
  if (order.size() != s.size()) throw std::invalid_argument("structure is cyclic");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> out;
  out.reserve(clamp.size());
  for (std::size_t t = 0; t < clamp.size(); ++t) {
    if (clamp[t].size() != s.size()) throw std::invalid_argument("clamp row width does not match structure");
    std::vector<int> frame(s.size(), 0);
    for (int node : order) {
      const auto i = static_cast<std::size_t>(node);
      if (clamp[t][i] >= 0) {
        check_state(model, node, clamp[t][i]);
        frame[i] = clamp[t][i];
        continue;
      }
      const auto& cpt = model.intra[i];
      const auto row = cpt.row(cpt.row_of(frame));
      std::vector<double> weights(row.begin(), row.end());
      auto it = model.inter.find(node);
      if (t > 0 && it != model.inter.end()) {
        const auto trans = it->second.row(static_cast<std::size_t>(out[t - 1][i]));
        double total = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
          weights[k] *= trans[k];
          total += weights[k];
        }
        if (!(total > 0.0)) weights.assign(trans.begin(), trans.end());
      }
      frame[i] = draw(rng, weights);
    }
    out.push_back(std::move(frame));
  }
  return out;
}

}  // namespace cpsor::dbn
