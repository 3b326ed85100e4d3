#pragma once

#include <vector>

#include "cpsor/cognitive_frame.hpp"
#include "cpsor/dbn.hpp"

namespace cpsor {

// Maps cognitive frames onto DBN node states. Acceleration bins are clamped
// into [accel_min_bin, accel_max_bin] so the node cardinality stays fixed.
struct CognitiveEncoding {
  bool include_behavior = true;
  int accel_min_bin = -40;  // -8 m/s^2 at 0.2 width
  int accel_max_bin = 19;   // bin covering [3.8, 4.0)

  int accel_states() const { return accel_max_bin - accel_min_bin + 1; }
  int accel_state(int bin) const;
  int accel_bin(int state) const { return state + accel_min_bin; }

  std::vector<dbn::NodeSpec> nodes() const;
  std::vector<int> encode(const CognitiveFrame& frame) const;
  // Inverse of encode; the Behavior state, if present, is ignored because it
  // is implied by the other three response nodes.
  CognitiveFrame decode(const std::vector<int>& states) const;
};

dbn::DiscreteData encode_sequences(const std::vector<std::vector<CognitiveFrame>>& sequences,
                                   const CognitiveEncoding& encoding = {});

// Emotion as an exogenous root feeding the response nodes directly, with
// subjective style and NPC acceleration as the other parents.
dbn::DbnStructure ordinary_structure(const CognitiveEncoding& encoding = {});

// Path of the bundled ordinary-structure document.
std::string ordinary_structure_path();

}  // namespace cpsor
