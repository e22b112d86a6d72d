#include "handsteer/evaluation.hpp"
#include "handsteer/synth.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace handsteer;
using P = PostureLabel;
using G = GestureLabel;

namespace {

const RecognizerModel& trained() {
  static const auto model = load_model(HANDSTEER_TEST_MODEL_DIR);
  return model;
}

std::vector<Label> runs(std::initializer_list<std::pair<Label, int>> items) {
  std::vector<Label> out;
  for (const auto& [l, n] : items) out.insert(out.end(), static_cast<std::size_t>(n), l);
  return out;
}

}  // namespace

TEST_CASE("transitions are the gesture runs") {
  const auto truth = runs({{P::GoStraight, 6}, {G::Go2Left, 4}, {P::TurnLeft, 6}, {G::Left2Go, 2}, {P::GoStraight, 1}});
  const auto trs = truth_transitions(truth);
  REQUIRE(trs.size() == 2);
  CHECK(trs[0].begin == 6);
  CHECK(trs[0].end == 10);
  CHECK(trs[0].gesture == G::Go2Left);
  CHECK(trs[1].begin == 16);
  CHECK(trs[1].end == 18);
  CHECK(trs[1].gesture == G::Left2Go);
}

TEST_CASE("window truth on a worked example") {
  // W = 4; Go on 0..5, Go2Left on 6..9, TurnLeft on 10..15.
  const auto truth = runs({{P::GoStraight, 6}, {G::Go2Left, 4}, {P::TurnLeft, 6}});
  const auto wt = window_truth(truth, 4);
  REQUIRE(wt.size() == 12);
  const std::vector<std::string> expect = {"GoStraight", "GoStraight", "GoStraight", "GoStraight",
                                           "Go2Left",    "Go2Left",    "Go2Left",    "TurnLeft",
                                           "TurnLeft",   "TurnLeft",   "TurnLeft",   "TurnLeft"};
  for (std::size_t i = 0; i < wt.size(); ++i) {
    CHECK(wt[i].end_index == i + 4);
    CHECK(label_name(wt[i].label) == expect[i]);
    // Band reaches W frames either side of [6, 10).
    CHECK(wt[i].in_band == (wt[i].end_index >= 2 && wt[i].end_index <= 14));
  }
}

TEST_CASE("posture ties go to the later posture") {
  const auto truth = runs({{P::GoStraight, 3}, {P::Stop, 2}});
  const auto wt = window_truth(truth, 4);
  REQUIRE(wt.size() == 1);
  CHECK(label_name(wt[0].label) == "Stop");
  const auto t2 = runs({{P::GoStraight, 4}, {P::Stop, 1}});
  CHECK(label_name(window_truth(t2, 4)[0].label) == "GoStraight");
}

TEST_CASE("event lines") {
  StepOutput o;
  o.t = 0.5;
  o.meta = MetaState::TransitionState;
  o.label = G::Go2Left;
  o.raw_command = SteeringCommand{2};
  o.filtered_command = SteeringCommand{1};
  o.margin = 0.125;
  CHECK(format_event(o) == "0.5 TransitionState Go2Left 2 1 0.125");
  StepOutput none;
  none.t = 1.02;
  CHECK(format_event(none) == "1.02 NoHand - - - -");
}

TEST_CASE("confusion matrix slots") {
  ConfusionMatrix m;
  CHECK(m.labels.size() == 13);
  CHECK(m.labels.front() == "GoStraight");
  CHECK(m.labels.back() == "Reverse2Go");
  m.add(P::Stop, G::Go2Stop);
  std::size_t total = 0;
  for (const auto& row : m.count)
    for (auto c : row) total += c;
  CHECK(total == 1);
  CHECK(m.count[3][5 + 4] == 1);
}

TEST_CASE("evaluating a generated stream") {
  const auto s = synth_generate(evaluation_scenarios(0.01, 7)[0]);
  const auto ev = evaluate_stream(trained(), s, "osc");
  CHECK(ev.frames == 1000);
  CHECK(ev.outputs.size() == 975);
  CHECK(ev.events.size() == 975);
  CHECK(ev.labelled);
  CHECK(ev.windows_scored > 0);
  CHECK(ev.windows_scored < 975);
  CHECK(ev.raw_errors == 0);
  CHECK(ev.filtered_errors == 0);
  CHECK(ev.raw_errors_all >= ev.raw_errors);
  CHECK(ev.events[0] == format_event(ev.outputs[0]));
  CHECK(ev.outputs[0].t == s.frames[25].t);

  LabeledStream bare = s;
  bare.truth.reset();
  const auto ev2 = evaluate_stream(trained(), bare);
  CHECK_FALSE(ev2.labelled);
  CHECK(ev2.events == ev.events);
}

TEST_CASE("eval report is versioned JSON") {
  const auto s = synth_generate(evaluation_scenarios(0.01, 7)[5]);
  const auto report = nlohmann::json::parse(eval_report({evaluate_stream(trained(), s, "tour")}));
  CHECK(report["schema_version"] == kReportSchemaVersion);
  CHECK(report["kind"] == "eval");
  CHECK(report["streams"][0]["name"] == "tour");
  CHECK(report["windows"] == 975);
  CHECK(report["raw_errors"] == 0);
}

TEST_CASE("bench agrees with the recognizer and SRC matches CRC outside the bands") {
  const auto s = synth_generate(evaluation_scenarios(0.01, 9)[6]);
  const auto b = run_bench(trained(), s, true);
  CHECK(b.windows == 975);
  REQUIRE(b.crc_labels.size() == 975);
  REQUIRE(b.src_labels.size() == 975);
  const auto ev = evaluate_stream(trained(), s);
  const auto truth = window_truth(*s.truth, 25);
  std::size_t outside = 0, agree = 0;
  for (std::size_t i = 0; i < 975; ++i) {
    CHECK(b.crc_labels[i] == label_name(*ev.outputs[i].label));
    if (truth[i].in_band) continue;
    ++outside;
    agree += b.crc_labels[i] == b.src_labels[i];
  }
  CHECK(agree == outside);
  CHECK(*b.src_total_seconds > 10.0 * b.crc_total_seconds);
  const auto report = nlohmann::json::parse(bench_report(b));
  CHECK(report["kind"] == "bench");
  CHECK(report.contains("src_over_crc"));
}
