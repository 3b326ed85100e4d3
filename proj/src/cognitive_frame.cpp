#include "cpsor/cognitive_frame.hpp"

#include <stdexcept>

namespace cpsor {

std::string_view to_string(RiskGrade v) {
  switch (v) {
    case RiskGrade::Safe: return "Safe";
    case RiskGrade::Moderate: return "Moderate";
    case RiskGrade::Danger: return "Danger";
  }
  return "?";
}

std::string_view to_string(Emotion v) {
  switch (v) {
    case Emotion::Anger: return "Anger";
    case Emotion::Neutral: return "Neutral";
    case Emotion::Fright: return "Fright";
  }
  return "?";
}

std::string_view to_string(SubStyle v) {
  switch (v) {
    case SubStyle::Aggressive: return "Aggressive";
    case SubStyle::Neutral: return "Neutral";
    case SubStyle::Conservative: return "Conservative";
  }
  return "?";
}

std::string_view to_string(ObjStyle v) {
  switch (v) {
    case ObjStyle::Gentle: return "Gentle";
    case ObjStyle::Moderate: return "Moderate";
    case ObjStyle::Hasty: return "Hasty";
  }
  return "?";
}

std::string_view to_string(ManLongi v) {
  switch (v) {
    case ManLongi::Accelerate: return "Accelerate";
    case ManLongi::Maintain: return "Maintain";
    case ManLongi::Decelerate: return "Decelerate";
  }
  return "?";
}

std::string_view to_string(ManLateral v) {
  switch (v) {
    case ManLateral::LeftTurn: return "LeftTurn";
    case ManLateral::Straight: return "Straight";
    case ManLateral::RightTurn: return "RightTurn";
  }
  return "?";
}

Behavior Behavior::from_index(int index) {
  if (index < 0 || index >= kBehaviorStates) {
    throw std::out_of_range("behavior index out of range");
  }
  return {static_cast<ObjStyle>(index / 9), static_cast<ManLongi>((index / 3) % 3),
          static_cast<ManLateral>(index % 3)};
}

std::string Behavior::label() const {
  return std::string(to_string(style)) + "-" + std::string(to_string(longi)) + "-" +
         std::string(to_string(lateral));
}

}  // namespace cpsor
