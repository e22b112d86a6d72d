#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace handsteer {

enum class PostureLabel { GoStraight, TurnLeft, TurnRight, Stop, Reverse };

// Every gesture has GoStraight as one endpoint.
enum class GestureLabel {
  Go2Left,
  Left2Go,
  Go2Right,
  Right2Go,
  Go2Stop,
  Stop2Go,
  Go2Reverse,
  Reverse2Go,
};

enum class MetaState { NoHand, PostureState, TransitionState };

inline constexpr std::array<PostureLabel, 5> kAllPostures = {
    PostureLabel::GoStraight, PostureLabel::TurnLeft, PostureLabel::TurnRight,
    PostureLabel::Stop, PostureLabel::Reverse};

inline constexpr std::array<GestureLabel, 8> kAllGestures = {
    GestureLabel::Go2Left,  GestureLabel::Left2Go,    GestureLabel::Go2Right,
    GestureLabel::Right2Go, GestureLabel::Go2Stop,    GestureLabel::Stop2Go,
    GestureLabel::Go2Reverse, GestureLabel::Reverse2Go};

// The four non-Go postures, in the order their bilateral recordings are trained.
inline constexpr std::array<PostureLabel, 4> kSidePostures = {
    PostureLabel::TurnLeft, PostureLabel::TurnRight, PostureLabel::Stop,
    PostureLabel::Reverse};

using Label = std::variant<PostureLabel, GestureLabel>;

/// Steering command value in 1..5.
struct SteeringCommand {
  int value = 1;
  friend bool operator==(SteeringCommand, SteeringCommand) = default;
};

std::string_view name(PostureLabel p);
std::string_view name(GestureLabel g);
std::string_view name(MetaState m);
std::string label_name(const Label& l);

std::optional<PostureLabel> parse_posture(std::string_view s);
std::optional<GestureLabel> parse_gesture(std::string_view s);
std::optional<Label> parse_label(std::string_view s);
std::optional<MetaState> parse_meta(std::string_view s);

/// Gesture from `from` to `to`; empty unless exactly one side is GoStraight.
std::optional<GestureLabel> gesture_between(PostureLabel from, PostureLabel to);
PostureLabel gesture_source(GestureLabel g);
PostureLabel gesture_target(GestureLabel g);

/// Command table: a posture maps to its own command, a gesture to the command
/// of the posture it ends in.
SteeringCommand map_to_command(PostureLabel p);
SteeringCommand map_to_command(GestureLabel g);
SteeringCommand map_to_command(const Label& l);

}  // namespace handsteer
