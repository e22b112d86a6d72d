#include "handsteer/synth.hpp"
#include "support.hpp"

using namespace handsteer;

TEST_CASE("noiseless GoStraight hold") {
  Scenario sc;
  sc.segments = {{PostureLabel::GoStraight, 2.0}};
  const auto s = synth_generate(sc);
  REQUIRE(s.size() == 100);
  const auto anchor = posture_anchor(PostureLabel::GoStraight).features();
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.frames[i].features() == anchor);
    CHECK(s.frames[i].speed() == 0.0);
    CHECK((*s.truth)[i] == Label{PostureLabel::GoStraight});
    CHECK(s.frames[i].t == doctest::Approx(0.02 * static_cast<double>(i)).epsilon(1e-15));
  }
}

TEST_CASE("a bilateral recording has 1000 frames and exactly two transitions") {
  const auto s = synth_generate(bilateral_scenario(PostureLabel::TurnLeft, 0.01, 3));
  REQUIRE(s.size() == 1000);
  std::vector<Label> runs;
  for (const auto& l : *s.truth)
    if (runs.empty() || !(runs.back() == l)) runs.push_back(l);
  const std::vector<Label> expect = {PostureLabel::GoStraight, GestureLabel::Go2Left,
                                     PostureLabel::TurnLeft, GestureLabel::Left2Go,
                                     PostureLabel::GoStraight};
  CHECK(runs == expect);
}

TEST_CASE("same seed gives bit-identical streams") {
  const auto sc = evaluation_scenarios(0.02, 5)[6];
  const auto a = synth_generate(sc);
  const auto b = synth_generate(sc);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.frames[i].features() == b.frames[i].features());
    CHECK(a.frames[i].palm_velocity == b.frames[i].palm_velocity);
  }
  auto other = sc;
  other.seed += 1;
  CHECK_FALSE(synth_generate(other).frames[3].features() == a.frames[3].features());
}

TEST_CASE("truth changes only at declared piece boundaries") {
  for (const auto& sc : evaluation_scenarios(0.01, 2)) {
    const auto s = synth_generate(sc);
    const auto pieces = scenario_pieces(sc);
    std::vector<std::size_t> declared;
    for (std::size_t k = 1; k < pieces.size(); ++k) declared.push_back(pieces[k].begin);
    std::vector<std::size_t> changes;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (!((*s.truth)[i] == (*s.truth)[i - 1])) changes.push_back(i);
    CHECK(changes == declared);
  }
}

TEST_CASE("transitions ramp monotonically with elevated speed") {
  Scenario sc;
  sc.segments = {{PostureLabel::GoStraight, 1.0}, {PostureLabel::TurnRight, 1.0}};
  const auto s = synth_generate(sc);
  const auto pieces = scenario_pieces(sc);
  const auto& tr = pieces[1];
  REQUIRE(std::holds_alternative<GestureLabel>(tr.label));
  CHECK(tr.end - tr.begin == 25);
  double prev_roll = 0.0;
  double peak = 0.0;
  for (std::size_t i = tr.begin; i < tr.end; ++i) {
    CHECK(s.frames[i].roll <= prev_roll);  // roll heads to the negative TurnRight anchor
    prev_roll = s.frames[i].roll;
    peak = std::max(peak, s.frames[i].speed());
  }
  CHECK(peak > 100.0);
  CHECK(s.frames[tr.begin - 1].speed() == 0.0);
  CHECK(s.frames[tr.end].speed() == 0.0);
}

TEST_CASE("the default evaluation streams are 20 s at 50 Hz") {
  const auto all = evaluation_scenarios(0.01, 1);
  CHECK(all.size() == 12);
  for (const auto& sc : all) {
    CHECK(sc.duration_s() == doctest::Approx(20.0));
    CHECK(synth_generate(sc).size() == 1000);
  }
}

TEST_CASE("scenario errors") {
  Scenario sc;
  sc.segments = {{PostureLabel::TurnLeft, 1.0}, {PostureLabel::TurnRight, 1.0}};
  CHECK_ERROR_CODE(synth_generate(sc), ErrorCode::IllegalTransition);
  sc.segments = {{PostureLabel::GoStraight, 0.0}};
  CHECK_ERROR_CODE(synth_generate(sc), ErrorCode::BadScenario);
  sc.segments.clear();
  CHECK_ERROR_CODE(synth_generate(sc), ErrorCode::BadScenario);
  CHECK_ERROR_CODE(parse_segments("Sideways:2"), ErrorCode::UnknownPosture);
  CHECK_ERROR_CODE(parse_segments("GoStraight"), ErrorCode::BadScenario);
  CHECK_ERROR_CODE(parse_segments("GoStraight:abc"), ErrorCode::BadScenario);
}

TEST_CASE("segment text round-trips") {
  const auto segs = parse_segments("GoStraight:2,Stop:3.5,GoStraight:1");
  REQUIRE(segs.size() == 3);
  CHECK(segs[1].posture == PostureLabel::Stop);
  CHECK(segs[1].dwell_s == 3.5);
  CHECK(format_segments(segs) == "GoStraight:2,Stop:3.5,GoStraight:1");
}

TEST_CASE("anchor normals are unit vectors matching their angles") {
  for (auto p : kAllPostures) {
    const auto a = posture_anchor(p);
    CHECK(a.normal().norm() == doctest::Approx(1.0));
    const auto f = a.features();
    CHECK(f[3] == a.roll);
    CHECK(f[4] == a.pitch);
    CHECK(f[5] == a.yaw);
  }
}
