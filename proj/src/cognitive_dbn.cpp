#include "cpsor/cognitive_dbn.hpp"

#include <algorithm>

namespace cpsor {

int CognitiveEncoding::accel_state(int bin) const {
  return std::clamp(bin, accel_min_bin, accel_max_bin) - accel_min_bin;
}

std::vector<dbn::NodeSpec> CognitiveEncoding::nodes() const {
  using dbn::Layer;
  std::vector<dbn::NodeSpec> out = {
      {"Npc_a", accel_states(), Layer::S},   {"Risk_grade", 3, Layer::S}, {"Emo_cluster", 3, Layer::O},
      {"Ego_a", accel_states(), Layer::O},   {"Sub_style", 3, Layer::O},  {"Obj_style", 3, Layer::R},
      {"Man_longi", 3, Layer::R},            {"Man_lateral", 3, Layer::R},
  };
  if (include_behavior) out.push_back({"Behavior", kBehaviorStates, Layer::R});
  return out;
}

std::vector<int> CognitiveEncoding::encode(const CognitiveFrame& f) const {
  std::vector<int> s = {accel_state(f.npc_a_bin),          static_cast<int>(f.risk_grade),
                        static_cast<int>(f.emo_cluster),  accel_state(f.ego_a_bin),
                        static_cast<int>(f.sub_style),    static_cast<int>(f.obj_style),
                        static_cast<int>(f.man_longi),    static_cast<int>(f.man_lateral)};
  if (include_behavior) s.push_back(f.behavior().index());
  return s;
}

CognitiveFrame CognitiveEncoding::decode(const std::vector<int>& s) const {
  if (s.size() != nodes().size()) throw std::invalid_argument("state vector width does not match encoding");
  CognitiveFrame f;
  f.npc_a_bin = accel_bin(s[0]);
  f.risk_grade = static_cast<RiskGrade>(s[1]);
  f.emo_cluster = static_cast<Emotion>(s[2]);
  f.ego_a_bin = accel_bin(s[3]);
  f.sub_style = static_cast<SubStyle>(s[4]);
  f.obj_style = static_cast<ObjStyle>(s[5]);
  f.man_longi = static_cast<ManLongi>(s[6]);
  f.man_lateral = static_cast<ManLateral>(s[7]);
  return f;
}

dbn::DiscreteData encode_sequences(const std::vector<std::vector<CognitiveFrame>>& sequences,
                                   const CognitiveEncoding& encoding) {
  dbn::DiscreteData data;
  data.n_nodes = encoding.nodes().size();
  for (const auto& seq : sequences) {
    std::vector<std::vector<int>> rows;
    rows.reserve(seq.size());
    for (const auto& f : seq) rows.push_back(encoding.encode(f));
    data.sequences.push_back(std::move(rows));
  }
  return data;
}

dbn::DbnStructure ordinary_structure(const CognitiveEncoding& encoding) {
  dbn::DbnStructure s;
  s.nodes = encoding.nodes();
  auto edge = [&](const char* from, const char* to) { s.intra_edges.emplace(s.index_of(from), s.index_of(to)); };
  edge("Sub_style", "Obj_style");
  edge("Sub_style", "Man_longi");
  edge("Sub_style", "Man_lateral");
  edge("Npc_a", "Man_longi");
  edge("Npc_a", "Ego_a");
  edge("Emo_cluster", "Obj_style");
  edge("Emo_cluster", "Man_longi");
  edge("Emo_cluster", "Man_lateral");
  edge("Emo_cluster", "Ego_a");
  if (encoding.include_behavior) {
    edge("Obj_style", "Behavior");
    edge("Man_longi", "Behavior");
    edge("Man_lateral", "Behavior");
  }
  for (std::size_t i = 0; i < s.size(); ++i) s.inter_edges.insert(static_cast<int>(i));
  return s;
}

std::string ordinary_structure_path() { return std::string(CPSOR_DATA_DIR) + "/ordinary_dbn_structure.txt"; }

}  // namespace cpsor
