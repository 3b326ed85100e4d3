#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cpsor/ablation.hpp"
#include "cpsor/text_format.hpp"

namespace cpsor::eval {
namespace {

int require_node(const dbn::DbnStructure& s, std::string_view name) {
  const int i = s.index_of(name);
  if (i < 0) throw std::invalid_argument("model has no node " + std::string(name));
  return i;
}

}  // namespace

DbnComparison compare_dbn(const dbn::DiscreteData& data, const dbn::DbnModel& sor, const dbn::DbnModel& ordinary,
                          int scenario_id) {
  if (sor.structure.nodes != ordinary.structure.nodes) throw std::invalid_argument("models have different nodes");
  if (data.n_nodes != sor.structure.size()) throw std::invalid_argument("data does not match the model nodes");
  const int npc = require_node(sor.structure, "Npc_a");
  const int ego = require_node(sor.structure, "Ego_a");
  const int npc_card = sor.structure.nodes[npc].cardinality;
  const int ego_card = sor.structure.nodes[ego].cardinality;

  DbnComparison report;
  report.scenario_id = scenario_id;
  report.bic_sor_params = dbn::bic_score(sor, data, dbn::Penalty::Params);
  report.bic_ordinary_params = dbn::bic_score(ordinary, data, dbn::Penalty::Params);
  report.bic_sor_nodes = dbn::bic_score(sor, data, dbn::Penalty::Nodes);
  report.bic_ordinary_nodes = dbn::bic_score(ordinary, data, dbn::Penalty::Nodes);

  std::vector<std::vector<double>> counts(npc_card, std::vector<double>(ego_card, 0.0));
  double total = 0.0;
  for (const auto& seq : data.sequences) {
    for (const auto& frame : seq) {
      counts[frame[npc]][frame[ego]] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) throw std::invalid_argument("comparison needs data");

  for (int s = 0; s < npc_card; ++s) {
    double row_total = 0.0;
    for (double c : counts[s]) row_total += c;
    if (row_total == 0.0) continue;
    const auto p_sor = dbn::infer_conditional(sor, ego, {{npc, s}});
    const auto p_ord = dbn::infer_conditional(ordinary, ego, {{npc, s}});
    double tv_sor = 0.0, tv_ord = 0.0;
    for (int e = 0; e < ego_card; ++e) {
      const double emp = counts[s][e] / row_total;
      tv_sor += std::abs(p_sor[e] - emp);
      tv_ord += std::abs(p_ord[e] - emp);
      report.curve.push_back({s, e, p_sor[e], p_ord[e], emp});
    }
    const double w = row_total / total;
    report.tv_sor += 0.5 * w * tv_sor;
    report.tv_ordinary += 0.5 * w * tv_ord;
  }
  return report;
}

std::string comparison_csv(const std::vector<DbnComparison>& reports) {
  std::ostringstream out;
  out << "scenario_id,bic_sor_params,bic_ordinary_params,bic_sor_nodes,bic_ordinary_nodes,tv_sor,tv_ordinary\n";
  for (const auto& r : reports) {
    out << r.scenario_id << ',' << format_number(r.bic_sor_params, 12) << ','
        << format_number(r.bic_ordinary_params, 12) << ',' << format_number(r.bic_sor_nodes, 12) << ','
        << format_number(r.bic_ordinary_nodes, 12) << ',' << format_number(r.tv_sor, 12) << ','
        << format_number(r.tv_ordinary, 12) << '\n';
  }
  return out.str();
}

std::string curves_csv(const std::vector<DbnComparison>& reports) {
  std::ostringstream out;
  out << "scenario_id,npc_a_state,ego_a_state,p_sor,p_ordinary,p_empirical\n";
  for (const auto& r : reports) {
    for (const auto& p : r.curve) {
      out << r.scenario_id << ',' << p.npc_a_state << ',' << p.ego_a_state << ',' << format_number(p.sor, 12) << ','
          << format_number(p.ordinary, 12) << ',' << format_number(p.empirical, 12) << '\n';
    }
  }
  return out.str();
}

}  // namespace cpsor::eval
