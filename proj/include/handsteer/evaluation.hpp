#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "handsteer/recognizer.hpp"

namespace handsteer {

inline constexpr int kReportSchemaVersion = 1;

/// Frame range [begin, end) of one true transition.
struct TruthTransition {
  std::size_t begin = 0;
  std::size_t end = 0;
  GestureLabel gesture = GestureLabel::Go2Left;
};

std::vector<TruthTransition> truth_transitions(const std::vector<Label>& truth);

struct WindowTruth {
  std::size_t end_index = 0;
  Label label;
  bool in_band = false;  ///< window end within ±W frames of a true transition
};

/// Ground truth for every window of a labelled stream. A window takes the
/// gesture label when more than W/2 of its frames lie in that transition,
/// otherwise the posture covering most of its frames.
std::vector<WindowTruth> window_truth(const std::vector<Label>& truth, int window);

/// One line per frame: `t meta raw_label raw_command filtered_command margin`.
/// Missing fields are written as `-`.
std::string format_event(const StepOutput& out);

struct ConfusionMatrix {
  std::vector<std::string> labels;             ///< 5 postures then 8 gestures
  std::vector<std::vector<std::size_t>> count;  ///< [truth][predicted]

  ConfusionMatrix();
  void add(const Label& truth, const Label& predicted);
};

struct StreamEvaluation {
  std::string name;
  std::size_t frames = 0;
  std::vector<StepOutput> outputs;  ///< one per window, in stream order
  std::vector<std::string> events;  ///< format_event of every output
  double seconds_total = 0.0;
  double seconds_per_window_median = 0.0;

  bool labelled = false;
  std::size_t windows_scored = 0;   ///< outside boundary bands
  std::size_t raw_errors = 0;       ///< outside bands
  std::size_t filtered_errors = 0;  ///< outside bands
  std::size_t raw_errors_all = 0;
  std::size_t filtered_errors_all = 0;
  ConfusionMatrix confusion;        ///< outside bands
  ConfusionMatrix confusion_all;

  double raw_accuracy() const;
  double filtered_accuracy() const;
  double raw_accuracy_all() const;
  double filtered_accuracy_all() const;
};

/// Replays a stream through a fresh recognizer and scores it when truth is
/// present.
StreamEvaluation evaluate_stream(const RecognizerModel& model, const LabeledStream& stream,
                                 std::string name = {});

struct BenchResult {
  std::size_t windows = 0;
  double precompute_seconds = 0.0;  ///< three projectors
  double crc_total_seconds = 0.0;
  double crc_median_seconds = 0.0;
  std::optional<double> src_total_seconds;
  std::optional<double> src_median_seconds;
  std::vector<std::string> crc_labels;
  std::vector<std::string> src_labels;
};

/// Times decide_window over every window of `stream` with CRC and,
/// optionally, SRC.
BenchResult run_bench(const RecognizerModel& model, const LabeledStream& stream, bool with_src);

/// Versioned JSON reports.
std::string eval_report(const std::vector<StreamEvaluation>& streams);
std::string bench_report(const BenchResult& bench);

}  // namespace handsteer
