#include "cpsor/dbn.hpp"

#include <algorithm>
#include <functional>

namespace cpsor::dbn {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::S: return "S";
    case Layer::O: return "O";
    case Layer::R: return "R";
  }
  return "?";
}

Layer layer_from_string(std::string_view text) {
  if (text == "S") return Layer::S;
  if (text == "O") return Layer::O;
  if (text == "R") return Layer::R;
  throw std::invalid_argument("unknown layer '" + std::string(text) + "'");
}

bool sor_edge_allowed(Layer from, Layer to) {
  switch (from) {
    case Layer::S: return to == Layer::O;
    case Layer::O: return to == Layer::O || to == Layer::R;
    case Layer::R: return to == Layer::R;
  }
  return false;
}

int DbnStructure::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].name == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown node '" + std::string(name) + "'");
}

std::vector<int> DbnStructure::parents(int node) const {
  std::vector<int> out;
  for (const auto& [from, to] : intra_edges) {
    if (to == node) out.push_back(from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> DbnStructure::topological_order() const {
  const auto n = nodes.size();
  std::vector<int> indegree(n, 0);
  for (const auto& e : intra_edges) ++indegree[static_cast<std::size_t>(e.second)];
  std::vector<int> order;
  std::vector<bool> done(n, false);
  while (order.size() < n) {
    int next = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && indegree[i] == 0) {
        next = static_cast<int>(i);
        break;
      }
    }
    if (next < 0) return {};  // cycle
    done[static_cast<std::size_t>(next)] = true;
    order.push_back(next);
    for (const auto& e : intra_edges) {
      if (e.first == next) --indegree[static_cast<std::size_t>(e.second)];
    }
  }
  return order;
}

bool DbnStructure::is_acyclic() const { return topological_order().size() == nodes.size(); }

bool DbnStructure::respects_sor() const {
  return std::all_of(intra_edges.begin(), intra_edges.end(), [&](const Edge& e) {
    return sor_edge_allowed(nodes[static_cast<std::size_t>(e.first)].layer,
                            nodes[static_cast<std::size_t>(e.second)].layer);
  });
}

void DbnStructure::validate(bool require_sor) const {
  const int n = static_cast<int>(nodes.size());
  for (const auto& node : nodes) {
    if (node.cardinality < 1) throw std::invalid_argument("node " + node.name + " has no states");
    if (node.name.empty() || node.name.find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("invalid node name '" + node.name + "'");
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i].name == nodes[j].name) throw std::invalid_argument("duplicate node " + nodes[i].name);
    }
  }
  for (const auto& [from, to] : intra_edges) {
    if (from < 0 || to < 0 || from >= n || to >= n || from == to) {
      throw std::invalid_argument("invalid intra edge");
    }
  }
  for (int i : inter_edges) {
    if (i < 0 || i >= n) throw std::invalid_argument("invalid inter edge");
  }
  if (!is_acyclic()) throw std::invalid_argument("intra edges contain a cycle");
  if (require_sor && !respects_sor()) throw std::invalid_argument("intra edge violates the SOR layer rule");
}

int structural_hamming_distance(const DbnStructure& a, const DbnStructure& b) {
  const int n = static_cast<int>(std::max(a.size(), b.size()));
  int d = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool a_ij = a.intra_edges.count({i, j}) > 0, a_ji = a.intra_edges.count({j, i}) > 0;
      const bool b_ij = b.intra_edges.count({i, j}) > 0, b_ji = b.intra_edges.count({j, i}) > 0;
      if (a_ij == b_ij && a_ji == b_ji) continue;
      ++d;
    }
  }
  return d;
}

std::size_t Cpt::rows() const {
  std::size_t r = 1;
  for (int c : parent_cardinalities) r *= static_cast<std::size_t>(c);
  return r;
}

std::size_t Cpt::row_of(std::span<const int> frame) const {
  std::size_t r = 0;
  for (std::size_t p = 0; p < parents.size(); ++p) {
    r = r * static_cast<std::size_t>(parent_cardinalities[p]) +
        static_cast<std::size_t>(frame[static_cast<std::size_t>(parents[p])]);
  }
  return r;
}

std::span<const double> Cpt::row(std::size_t r) const {
  return std::span<const double>(table).subspan(r * static_cast<std::size_t>(child_cardinality),
                                                static_cast<std::size_t>(child_cardinality));
}

double Cpt::probability(std::span<const int> frame) const {
  return row(row_of(frame))[static_cast<std::size_t>(frame[static_cast<std::size_t>(child)])];
}

std::size_t DiscreteData::total_frames() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.size();
  return n;
}

}  // namespace cpsor::dbn
