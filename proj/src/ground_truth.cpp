#include <algorithm>
#include <cmath>

#include "cpsor/discretizer.hpp"
#include "cpsor/scenario.hpp"

namespace cpsor::sim {
namespace {

std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return w;
}

// Discretized Gaussian over `card` states.
std::vector<double> bell(int card, double center, double width) {
  std::vector<double> w(static_cast<std::size_t>(card));
  for (int s = 0; s < card; ++s) {
    const double z = (static_cast<double>(s) - center) / width;
    w[static_cast<std::size_t>(s)] = std::exp(-0.5 * z * z) + 1e-4;
  }
  return normalized(std::move(w));
}

dbn::Cpt make_cpt(const dbn::DbnStructure& s, int child) {
  dbn::Cpt cpt;
  cpt.child = child;
  cpt.parents = s.parents(child);
  cpt.child_cardinality = s.nodes[static_cast<std::size_t>(child)].cardinality;
  for (int p : cpt.parents) cpt.parent_cardinalities.push_back(s.nodes[static_cast<std::size_t>(p)].cardinality);
  cpt.table.assign(cpt.rows() * static_cast<std::size_t>(cpt.child_cardinality), 0.0);
  return cpt;
}

// Fills every row by calling fn(parent states in CPT order).
template <typename Fn>
void fill(dbn::Cpt& cpt, Fn fn) {
  std::vector<int> states(cpt.parents.size(), 0);
  const auto card = static_cast<std::size_t>(cpt.child_cardinality);
  for (std::size_t r = 0; r < cpt.rows(); ++r) {
    const auto row = fn(states);
    std::copy(row.begin(), row.end(), cpt.table.begin() + static_cast<std::ptrdiff_t>(r * card));
    for (std::size_t d = states.size(); d-- > 0;) {
      if (++states[d] < cpt.parent_cardinalities[d]) break;
      states[d] = 0;
    }
  }
}

}  // namespace

dbn::DbnModel reference_sor_dbn(const CognitiveEncoding& enc, double persistence) {
  if (persistence < 0.0 || persistence >= 1.0) throw std::invalid_argument("persistence must lie in [0, 1)");
  dbn::DbnStructure s;
  s.nodes = enc.nodes();
  auto id = [&](const char* name) { return s.index_of(name); };
  auto edge = [&](const char* from, const char* to) { s.intra_edges.emplace(id(from), id(to)); };
  edge("Risk_grade", "Emo_cluster");
  edge("Sub_style", "Emo_cluster");
  edge("Npc_a", "Ego_a");
  edge("Emo_cluster", "Ego_a");
  edge("Emo_cluster", "Obj_style");
  edge("Sub_style", "Obj_style");
  edge("Emo_cluster", "Man_lateral");
  edge("Ego_a", "Man_longi");
  if (enc.include_behavior) {
    edge("Obj_style", "Behavior");
    edge("Man_longi", "Behavior");
    edge("Man_lateral", "Behavior");
  }
  if (persistence > 0.0) {
    for (std::size_t i = 0; i < s.size(); ++i) s.inter_edges.insert(static_cast<int>(i));
  }
  s.validate(true);

  dbn::DbnModel m;
  m.structure = s;
  for (int i = 0; i < static_cast<int>(s.size()); ++i) m.intra.push_back(make_cpt(s, i));
  const int a_card = enc.accel_states();
  const double zero_state = -static_cast<double>(enc.accel_min_bin);

  fill(m.intra[static_cast<std::size_t>(id("Npc_a"))], [&](const std::vector<int>&) { return bell(a_card, zero_state, 8.0); });
  fill(m.intra[static_cast<std::size_t>(id("Risk_grade"))], [](const std::vector<int>&) { return std::vector<double>{0.6, 0.25, 0.15}; });
  fill(m.intra[static_cast<std::size_t>(id("Sub_style"))], [](const std::vector<int>&) { return std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}; });
  // Parents (Risk_grade, Sub_style) in ascending node order.
  fill(m.intra[static_cast<std::size_t>(id("Emo_cluster"))], [](const std::vector<int>& p) {
    const std::vector<double> by_risk[3] = {{0.15, 0.75, 0.10}, {0.30, 0.40, 0.30}, {0.30, 0.10, 0.60}};
    auto w = by_risk[p[0]];
    if (p[1] == static_cast<int>(SubStyle::Aggressive)) {
      w[0] += 0.10;
      w[1] -= 0.05;
      w[2] -= 0.05;
    } else if (p[1] == static_cast<int>(SubStyle::Conservative)) {
      w[0] -= 0.05;
      w[1] -= 0.05;
      w[2] += 0.10;
    }
    return normalized(w);
  });
  // Parents (Npc_a, Emo_cluster).
  fill(m.intra[static_cast<std::size_t>(id("Ego_a"))], [&](const std::vector<int>& p) {
    const double npc_bin = static_cast<double>(enc.accel_bin(p[0]));
    const double offset[3] = {4.0, 0.0, -6.0};
    return bell(a_card, zero_state + 0.5 * npc_bin + offset[p[1]], 3.0);
  });
  // Parents (Emo_cluster, Sub_style).
  fill(m.intra[static_cast<std::size_t>(id("Obj_style"))], [](const std::vector<int>& p) {
    const std::vector<double> by_emo[3] = {{0.10, 0.30, 0.60}, {0.60, 0.30, 0.10}, {0.20, 0.40, 0.40}};
    auto w = by_emo[p[0]];
    if (p[1] == static_cast<int>(SubStyle::Aggressive)) w[2] += 0.2;
    if (p[1] == static_cast<int>(SubStyle::Conservative)) w[0] += 0.2;
    return normalized(w);
  });
  fill(m.intra[static_cast<std::size_t>(id("Man_longi"))], [&](const std::vector<int>& p) {
    const int bin = enc.accel_bin(p[0]);
    if (bin >= 2) return std::vector<double>{0.8, 0.15, 0.05};
    if (bin <= -3) return std::vector<double>{0.05, 0.15, 0.8};
    return std::vector<double>{0.1, 0.8, 0.1};
  });
  fill(m.intra[static_cast<std::size_t>(id("Man_lateral"))], [](const std::vector<int>& p) {
    const std::vector<double> by_emo[3] = {{0.2, 0.6, 0.2}, {0.05, 0.9, 0.05}, {0.15, 0.7, 0.15}};
    return by_emo[p[0]];
  });
  if (enc.include_behavior) {
    // Deterministic coupling of (Obj_style, Man_longi, Man_lateral).
    fill(m.intra[static_cast<std::size_t>(id("Behavior"))], [](const std::vector<int>& p) {
      std::vector<double> w(kBehaviorStates, 0.0);
      w[static_cast<std::size_t>(p[0] * 9 + p[1] * 3 + p[2])] = 1.0;
      return w;
    });
  }
  for (int i : s.inter_edges) {
    dbn::Cpt cpt;
    cpt.child = i;
    cpt.parents = {i};
    cpt.child_cardinality = s.nodes[static_cast<std::size_t>(i)].cardinality;
    cpt.parent_cardinalities = {cpt.child_cardinality};
    const auto card = static_cast<std::size_t>(cpt.child_cardinality);
    cpt.table.assign(card * card, (1.0 - persistence) / static_cast<double>(card));
    for (std::size_t k = 0; k < card; ++k) cpt.table[k * card + k] += persistence;
    m.inter.emplace(i, std::move(cpt));
  }
  return m;
}

std::vector<CognitiveFrame> annotate_ground_truth(const data::Episode& episode, const dbn::DbnModel& true_dbn,
                                                  std::uint64_t seed, const CognitiveEncoding& enc) {
  if (true_dbn.structure.nodes != enc.nodes()) throw std::invalid_argument("true DBN does not cover the cognitive nodes");
  const int npc_a = true_dbn.structure.index_of("Npc_a");
  const int risk = true_dbn.structure.index_of("Risk_grade");
  std::vector<std::vector<int>> clamp(episode.steps(), std::vector<int>(enc.nodes().size(), -1));
  for (std::size_t k = 0; k < episode.steps(); ++k) {
    const int bin = episode.tracks.size() > 1 ? disc::bin_acceleration(episode.tracks[1][k].a) : 0;
    clamp[k][static_cast<std::size_t>(npc_a)] = enc.accel_state(bin);
    clamp[k][static_cast<std::size_t>(risk)] = static_cast<int>(disc::step_risk_grade(episode, k));
  }
  const auto states = dbn::sample_clamped(true_dbn, clamp, seed);
  std::vector<CognitiveFrame> frames;
  frames.reserve(states.size());
  for (const auto& s : states) frames.push_back(enc.decode(s));
  return frames;
}

}  // namespace cpsor::sim
