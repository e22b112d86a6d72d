#include "handsteer/labels.hpp"

namespace handsteer {

std::string_view name(PostureLabel p) {
  switch (p) {
    case PostureLabel::GoStraight: return "GoStraight";
    case PostureLabel::TurnLeft: return "TurnLeft";
    case PostureLabel::TurnRight: return "TurnRight";
    case PostureLabel::Stop: return "Stop";
    case PostureLabel::Reverse: return "Reverse";
  }
  return "?";
}

std::string_view name(GestureLabel g) {
  switch (g) {
    case GestureLabel::Go2Left: return "Go2Left";
    case GestureLabel::Left2Go: return "Left2Go";
    case GestureLabel::Go2Right: return "Go2Right";
    case GestureLabel::Right2Go: return "Right2Go";
    case GestureLabel::Go2Stop: return "Go2Stop";
    case GestureLabel::Stop2Go: return "Stop2Go";
    case GestureLabel::Go2Reverse: return "Go2Reverse";
    case GestureLabel::Reverse2Go: return "Reverse2Go";
  }
  return "?";
}

std::string_view name(MetaState m) {
  switch (m) {
    case MetaState::NoHand: return "NoHand";
    case MetaState::PostureState: return "PostureState";
    case MetaState::TransitionState: return "TransitionState";
  }
  return "?";
}

std::string label_name(const Label& l) {
  return std::visit([](auto v) { return std::string(name(v)); }, l);
}

std::optional<PostureLabel> parse_posture(std::string_view s) {
  for (auto p : kAllPostures)
    if (name(p) == s) return p;
  return std::nullopt;
}

std::optional<GestureLabel> parse_gesture(std::string_view s) {
  for (auto g : kAllGestures)
    if (name(g) == s) return g;
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view s) {
  if (auto p = parse_posture(s)) return Label{*p};
  if (auto g = parse_gesture(s)) return Label{*g};
  return std::nullopt;
}

std::optional<MetaState> parse_meta(std::string_view s) {
  for (auto m : {MetaState::NoHand, MetaState::PostureState, MetaState::TransitionState})
    if (name(m) == s) return m;
  return std::nullopt;
}

std::optional<GestureLabel> gesture_between(PostureLabel from, PostureLabel to) {
  for (auto g : kAllGestures)
    if (gesture_source(g) == from && gesture_target(g) == to) return g;
  return std::nullopt;
}

namespace {

PostureLabel side_of(GestureLabel g) {
  switch (g) {
    case GestureLabel::Go2Left:
    case GestureLabel::Left2Go: return PostureLabel::TurnLeft;
    case GestureLabel::Go2Right:
    case GestureLabel::Right2Go: return PostureLabel::TurnRight;
    case GestureLabel::Go2Stop:
    case GestureLabel::Stop2Go: return PostureLabel::Stop;
    case GestureLabel::Go2Reverse:
    case GestureLabel::Reverse2Go: return PostureLabel::Reverse;
  }
  return PostureLabel::GoStraight;
}

bool leaves_go(GestureLabel g) {
  return static_cast<int>(g) % 2 == 0;
}

}  // namespace

PostureLabel gesture_source(GestureLabel g) {
  return leaves_go(g) ? PostureLabel::GoStraight : side_of(g);
}

PostureLabel gesture_target(GestureLabel g) {
  return leaves_go(g) ? side_of(g) : PostureLabel::GoStraight;
}

SteeringCommand map_to_command(PostureLabel p) {
  return SteeringCommand{static_cast<int>(p) + 1};
}

SteeringCommand map_to_command(GestureLabel g) {
  return map_to_command(gesture_target(g));
}

SteeringCommand map_to_command(const Label& l) {
  return std::visit([](auto v) { return map_to_command(v); }, l);
}

}  // namespace handsteer
