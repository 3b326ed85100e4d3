#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace cpsor {

enum class RiskGrade : std::uint8_t { Safe, Moderate, Danger };
enum class Emotion : std::uint8_t { Anger, Neutral, Fright };
enum class SubStyle : std::uint8_t { Aggressive, Neutral, Conservative };
enum class ObjStyle : std::uint8_t { Gentle, Moderate, Hasty };
enum class ManLongi : std::uint8_t { Accelerate, Maintain, Decelerate };
enum class ManLateral : std::uint8_t { LeftTurn, Straight, RightTurn };

std::string_view to_string(RiskGrade v);
std::string_view to_string(Emotion v);
std::string_view to_string(SubStyle v);
std::string_view to_string(ObjStyle v);
std::string_view to_string(ManLongi v);
std::string_view to_string(ManLateral v);

// Behavior couples the objective style with both maneuvers: 27 distinct values.
struct Behavior {
  ObjStyle style = ObjStyle::Moderate;
  ManLongi longi = ManLongi::Maintain;
  ManLateral lateral = ManLateral::Straight;

  int index() const {
    return static_cast<int>(style) * 9 + static_cast<int>(longi) * 3 +
           static_cast<int>(lateral);
  }
  static Behavior from_index(int index);
  std::string label() const;
  friend bool operator==(const Behavior&, const Behavior&) = default;
};

inline constexpr int kBehaviorStates = 27;

struct CognitiveFrame {
  RiskGrade risk_grade = RiskGrade::Safe;
  int npc_a_bin = 0;
  int ego_a_bin = 0;
  Emotion emo_cluster = Emotion::Neutral;
  SubStyle sub_style = SubStyle::Neutral;
  ObjStyle obj_style = ObjStyle::Moderate;
  ManLongi man_longi = ManLongi::Maintain;
  ManLateral man_lateral = ManLateral::Straight;

  Behavior behavior() const { return {obj_style, man_longi, man_lateral}; }
  friend bool operator==(const CognitiveFrame&, const CognitiveFrame&) = default;
};

// Cognitive node order used by every graph and DBN in the project.
enum class CognitiveNode : std::uint8_t {
  NpcA,
  RiskGrade,
  EmoCluster,
  EgoA,
  SubStyle,
  ObjStyle,
  ManLongi,
  ManLateral,
  Behavior,
};

inline constexpr std::array<std::string_view, 9> kCognitiveNodeNames = {
    "Npc_a",    "Risk_grade", "Emo_cluster", "Ego_a",    "Sub_style",
    "Obj_style", "Man_longi", "Man_lateral", "Behavior"};

}  // namespace cpsor
