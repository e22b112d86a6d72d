#include <map>
#include <set>

#include "handsteer/labels.hpp"
#include "support.hpp"

using namespace handsteer;

TEST_CASE("command table covers all thirteen labels") {
  // Table as printed: value -> labels assigned to it.
  const std::map<std::string, int> table = {
      {"GoStraight", 1}, {"Left2Go", 1},   {"Right2Go", 1}, {"Stop2Go", 1},
      {"Reverse2Go", 1}, {"TurnLeft", 2},  {"Go2Left", 2},  {"TurnRight", 3},
      {"Go2Right", 3},   {"Stop", 4},      {"Go2Stop", 4},  {"Reverse", 5},
      {"Go2Reverse", 5}};
  std::size_t seen = 0;
  for (auto p : kAllPostures) {
    CHECK(map_to_command(p).value == table.at(std::string(name(p))));
    CHECK(map_to_command(Label{p}).value == table.at(std::string(name(p))));
    ++seen;
  }
  for (auto g : kAllGestures) {
    CHECK(map_to_command(g).value == table.at(std::string(name(g))));
    CHECK(map_to_command(Label{g}).value == table.at(std::string(name(g))));
    ++seen;
  }
  CHECK(seen == table.size());
}

TEST_CASE("quoted command examples") {
  CHECK(map_to_command(GestureLabel::Go2Left).value == 2);
  CHECK(map_to_command(GestureLabel::Stop2Go).value == 1);
  CHECK(map_to_command(PostureLabel::Reverse).value == 5);
}

TEST_CASE("a gesture maps to the command of the posture it ends in") {
  for (auto g : kAllGestures) CHECK(map_to_command(g) == map_to_command(gesture_target(g)));
}

TEST_CASE("every gesture has GoStraight at one end") {
  std::set<std::pair<PostureLabel, PostureLabel>> pairs;
  for (auto g : kAllGestures) {
    const auto a = gesture_source(g), b = gesture_target(g);
    CHECK((a == PostureLabel::GoStraight) != (b == PostureLabel::GoStraight));
    CHECK(gesture_between(a, b) == g);
    pairs.insert({a, b});
  }
  CHECK(pairs.size() == 8);
  CHECK_FALSE(gesture_between(PostureLabel::TurnLeft, PostureLabel::TurnRight));
  CHECK_FALSE(gesture_between(PostureLabel::GoStraight, PostureLabel::GoStraight));
}

TEST_CASE("names round-trip") {
  for (auto p : kAllPostures) {
    CHECK(parse_posture(name(p)) == p);
    CHECK(parse_label(name(p)) == Label{p});
  }
  for (auto g : kAllGestures) {
    CHECK(parse_gesture(name(g)) == g);
    CHECK(parse_label(name(g)) == Label{g});
  }
  for (auto m : {MetaState::NoHand, MetaState::PostureState, MetaState::TransitionState})
    CHECK(parse_meta(name(m)) == m);
  CHECK_FALSE(parse_label("Sideways"));
  CHECK_FALSE(parse_posture("Go2Left"));
}
