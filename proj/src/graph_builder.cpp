#include "cpsor/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "cpsor/text_format.hpp"

namespace cpsor::graph {

int GraphSnapshot::index_of(const std::string& id) const {
  auto it = std::find(node_ids.begin(), node_ids.end(), id);
  return it == node_ids.end() ? -1 : static_cast<int>(it - node_ids.begin());
}

namespace {

std::array<double, 4> raw_features(const data::VehicleState& s) { return {s.x, s.y, s.v, s.a}; }

}  // namespace

FeatureNormalizer FeatureNormalizer::fit(const std::vector<data::Sample>& samples) {
  std::array<double, 4> sum{}, sq{};
  double n = 0.0;
  for (const auto& sample : samples) {
    for (const auto& track : sample.history) {
      for (const auto& s : track) {
        const auto f = raw_features(s);
        for (std::size_t d = 0; d < 4; ++d) sum[d] += f[d];
        n += 1.0;
      }
    }
  }
  FeatureNormalizer out;
  if (n == 0.0) return out;
  for (std::size_t d = 0; d < 4; ++d) out.mean[d] = sum[d] / n;
  for (const auto& sample : samples) {
    for (const auto& track : sample.history) {
      for (const auto& s : track) {
        const auto f = raw_features(s);
        for (std::size_t d = 0; d < 4; ++d) sq[d] += (f[d] - out.mean[d]) * (f[d] - out.mean[d]);
      }
    }
  }
  for (std::size_t d = 0; d < 4; ++d) {
    const double sd = std::sqrt(sq[d] / n);
    out.scale[d] = sd > 1e-12 ? sd : 1.0;
  }
  return out;
}

Eigen::RowVector4d FeatureNormalizer::apply(const data::VehicleState& s) const {
  const auto f = raw_features(s);
  Eigen::RowVector4d out;
  for (std::size_t d = 0; d < 4; ++d) out(static_cast<Eigen::Index>(d)) = (f[d] - mean[d]) / scale[d];
  return out;
}

std::string FeatureNormalizer::to_json() const {
  nlohmann::ordered_json j;
  j["mean"] = mean;
  j["scale"] = scale;
  return j.dump();
}

FeatureNormalizer FeatureNormalizer::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FeatureNormalizer out;
  out.mean = j.at("mean").get<std::array<double, 4>>();
  out.scale = j.at("scale").get<std::array<double, 4>>();
  return out;
}

GraphSnapshot build_physical_graph(std::span<const data::VehicleState> states, double d_close,
                                   const FeatureNormalizer& normalizer) {
  if (states.empty()) throw std::invalid_argument("physical graph needs at least one vehicle");
  if (!(d_close > 0.0)) throw std::invalid_argument("d_close must be positive");
  std::vector<std::size_t> order(states.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return states[a].vehicle_id < states[b].vehicle_id; });
  const auto n = static_cast<Eigen::Index>(states.size());
  GraphSnapshot g;
  g.kind = GraphKind::Physical;
  g.node_features.resize(n, 4);
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = states[order[static_cast<std::size_t>(i)]];
    if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
      throw std::invalid_argument("non-finite position for vehicle " + s.vehicle_id);
    }
    g.node_ids.push_back(s.vehicle_id);
    g.node_features.row(i) = normalizer.apply(s);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = states[order[static_cast<std::size_t>(i)]];
      const auto& b = states[order[static_cast<std::size_t>(j)]];
      const double d = std::hypot(a.x - b.x, a.y - b.y);
      if (d < d_close) g.adjacency(i, j) = g.adjacency(j, i) = std::exp(-d);
    }
  }
  return g;
}

double edge_weight(const dbn::DbnModel& model, int parent, int child, int parent_state, int child_state) {
  const auto& cpt = model.intra.at(static_cast<std::size_t>(child));
  auto pos = std::find(cpt.parents.begin(), cpt.parents.end(), parent);
  if (pos == cpt.parents.end()) throw std::invalid_argument("no edge between the given nodes");
  if (cpt.parents.size() == 1) return cpt.row(static_cast<std::size_t>(parent_state))[static_cast<std::size_t>(child_state)];
  const auto joint = dbn::joint_marginal(model, {parent, child});
  const int pc = joint.cards[parent < child ? 0 : 1];
  const int cc = joint.cards[parent < child ? 1 : 0];
  auto at = [&](int ps, int cs) {
    const int a = parent < child ? ps : cs;
    const int b = parent < child ? cs : ps;
    return joint.values[static_cast<std::size_t>(a) * static_cast<std::size_t>(parent < child ? cc : pc) +
                        static_cast<std::size_t>(b)];
  };
  double p_parent = 0.0;
  for (int cs = 0; cs < cc; ++cs) p_parent += at(parent_state, cs);
  if (p_parent > 0.0) return at(parent_state, child_state) / p_parent;
  // Parent state has zero mass: weight the CPT by the other parents' own marginal.
  std::vector<int> others;
  for (int p : cpt.parents) {
    if (p != parent) others.push_back(p);
  }
  const auto other_joint = dbn::joint_marginal(model, others);
  std::vector<int> frame(model.structure.size(), 0);
  frame[static_cast<std::size_t>(parent)] = parent_state;
  frame[static_cast<std::size_t>(child)] = child_state;
  std::vector<int> state(others.size(), 0);
  double w = 0.0;
  for (double p_other : other_joint.values) {
    for (std::size_t k = 0; k < others.size(); ++k) frame[static_cast<std::size_t>(others[k])] = state[k];
    w += p_other * cpt.probability(frame);
    for (std::size_t d = others.size(); d-- > 0;) {
      if (++state[d] < other_joint.cards[d]) break;
      state[d] = 0;
    }
  }
  return w;
}

CognitiveWeights::CognitiveWeights(const dbn::DbnModel& model, const CognitiveEncoding& encoding)
    : encoding_(encoding) {
  const auto nodes = encoding.nodes();
  if (model.structure.nodes != nodes) throw std::invalid_argument("model nodes do not match the cognitive encoding");
  node_count_ = nodes.size();
  for (const auto& n : nodes) {
    cards_.push_back(n.cardinality);
    max_cardinality_ = std::max(max_cardinality_, n.cardinality);
  }
  for (const auto& [parent, child] : model.structure.intra_edges) {
    const int pc = cards_[static_cast<std::size_t>(parent)];
    const int cc = cards_[static_cast<std::size_t>(child)];
    std::vector<double> table(static_cast<std::size_t>(pc * cc));
    const auto& cpt = model.intra[static_cast<std::size_t>(child)];
    if (cpt.parents.size() == 1) {
      table = cpt.table;
    } else {
      for (int ps = 0; ps < pc; ++ps) {
        for (int cs = 0; cs < cc; ++cs) table[static_cast<std::size_t>(ps * cc + cs)] = edge_weight(model, parent, child, ps, cs);
      }
    }
    edges_.emplace_back(parent, child);
    tables_.push_back(std::move(table));
  }
}

double CognitiveWeights::weight(std::size_t edge, int parent_state, int child_state) const {
  const int cc = cards_[static_cast<std::size_t>(edges_[edge].second)];
  return tables_[edge][static_cast<std::size_t>(parent_state * cc + child_state)];
}

GraphSnapshot build_cognitive_graph(const CognitiveFrame& frame, const CognitiveWeights& weights) {
  const auto states = weights.encoding().encode(frame);
  const auto n = static_cast<Eigen::Index>(weights.node_count());
  const auto nodes = weights.encoding().nodes();
  GraphSnapshot g;
  g.kind = GraphKind::Cognitive;
  g.node_features = Eigen::MatrixXd::Zero(n, weights.max_cardinality());
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = states[static_cast<std::size_t>(i)];
    if (s < 0 || s >= weights.cardinalities()[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument("state out of range for node " + nodes[static_cast<std::size_t>(i)].name);
    }
    g.node_features(i, s) = 1.0;
    g.node_ids.push_back(nodes[static_cast<std::size_t>(i)].name);
  }
  for (std::size_t e = 0; e < weights.edges().size(); ++e) {
    const auto [parent, child] = weights.edges()[e];
    g.adjacency(child, parent) =
        weights.weight(e, states[static_cast<std::size_t>(parent)], states[static_cast<std::size_t>(child)]);
  }
  return g;
}

GraphSnapshot build_cognitive_graph(const CognitiveFrame& frame, const dbn::DbnModel& model,
                                    const CognitiveEncoding& encoding) {
  return build_cognitive_graph(frame, CognitiveWeights(model, encoding));
}

std::string dump_snapshot(const GraphSnapshot& g) {
  std::ostringstream out;
  out << (g.kind == GraphKind::Physical ? "physical" : "cognitive") << ' ' << g.node_ids.size() << '\n';
  out << "nodes";
  for (const auto& id : g.node_ids) out << ' ' << id;
  out << '\n';
  auto dump = [&](const char* name, const Eigen::MatrixXd& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j > 0) out << ' ';
        out << format_number(m(i, j), 9);
      }
      out << '\n';
    }
  };
  dump("features", g.node_features);
  dump("adjacency", g.adjacency);
  return out.str();
}

}  // namespace cpsor::graph
