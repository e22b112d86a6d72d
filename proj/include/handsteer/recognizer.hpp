#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "handsteer/classifiers.hpp"
#include "handsteer/dictionary.hpp"
#include "handsteer/labels.hpp"
#include "handsteer/signal.hpp"
#include "handsteer/synth.hpp"
#include "handsteer/training.hpp"

namespace handsteer {

enum class ClassifierKind { Crc, Src };

std::string_view name(ClassifierKind k);
std::optional<ClassifierKind> parse_classifier(std::string_view s);

/// A dictionary with its precomputed ridge operator.
struct ClassifierStage {
  Dictionary dict;
  Projector proj;
};

inline const std::string kStagePosture = "Posture";
inline const std::string kStageTransition = "Transition";

/// The three dictionaries behind the decision tree.
///   stage1  : speed windows, blocks {Posture, Transition}
///   postures: feature windows, one block per posture
///   gestures: feature windows, one block per gesture
struct RecognizerModel {
  int window = kDefaultWindow;
  ClassifierKind classifier = ClassifierKind::Crc;
  std::optional<double> src_lambda;  ///< fixed l1 weight; data-scaled default when empty
  ClassifierStage stage1;
  ClassifierStage postures;
  ClassifierStage gestures;

  /// Checks the trained shape: stage-1 has exactly two blocks, posture and
  /// gesture blocks have the expected sizes and every window shares W.
  void validate(std::size_t posture_block = 40, std::size_t gesture_block = 100) const;
};

/// Classifies y against one stage with the chosen method.
RecognitionResult classify_stage(const ClassifierStage& stage, const Eigen::VectorXd& y,
                                 ClassifierKind kind, std::optional<double> src_lambda = {});

MetaState stage1_decide(const SpeedColumn& speeds, const RecognizerModel& model);
std::pair<PostureLabel, ClassResiduals> classify_posture(const FeatureColumn& w,
                                                         const RecognizerModel& model);
std::pair<GestureLabel, ClassResiduals> classify_gesture(const FeatureColumn& w,
                                                         const RecognizerModel& model);

/// Majority vote over the last five commands. Ties go to the most recent of
/// the tied values; fewer than five entries vote with what is there.
class CommandFilter {
 public:
  static constexpr std::size_t kCapacity = 5;

  SteeringCommand push(SteeringCommand c);
  void clear() { ring_.clear(); }
  std::size_t size() const { return ring_.size(); }
  const std::deque<SteeringCommand>& contents() const { return ring_; }

 private:
  std::deque<SteeringCommand> ring_;
};

SteeringCommand filter_command(CommandFilter& filter, SteeringCommand c);

struct StepOutput {
  double t = 0.0;
  MetaState meta = MetaState::NoHand;
  std::optional<Label> label;
  std::optional<SteeringCommand> raw_command;
  std::optional<SteeringCommand> filtered_command;
  double margin = 0.0;
};

/// Per-stream decision tree state: rolling window and command filter. The
/// model is shared read-only.
class Recognizer {
 public:
  explicit Recognizer(std::shared_ptr<const RecognizerModel> model);

  /// Hand present. Returns nothing until W frames have been buffered; the
  /// first decision uses the window ending at the (W+1)-th frame.
  std::optional<StepOutput> step(const FeatureFrame& frame);
  std::optional<StepOutput> step(const SignalFrame& frame) { return step(to_feature_frame(frame)); }
  /// Hand absent: clears the window and the filter, reports NoHand.
  StepOutput step_absent(double t);

  const RecognizerModel& model() const { return *model_; }
  void reset();

 private:
  std::shared_ptr<const RecognizerModel> model_;
  std::deque<FeatureFrame> buffer_;
  std::size_t seen_ = 0;
  CommandFilter filter_;
};

/// Full decision for one window (no filtering).
struct WindowDecision {
  MetaState meta = MetaState::PostureState;
  Label label;
  SteeringCommand command;
  double margin = 0.0;
};

WindowDecision decide_window(const RecognizerModel& model, std::span<const FeatureFrame> frames);

struct TrainingConfig {
  int window = kDefaultWindow;
  ClassifierKind classifier = ClassifierKind::Crc;
  std::optional<double> lambda_stage1;
  std::optional<double> lambda_postures;
  std::optional<double> lambda_gestures;
  std::optional<double> src_lambda;
  bool center_stage1 = true;
  bool center_features = false;
  ClusteringOptions clustering;
  std::size_t gesture_per_cluster = 100;
  std::size_t posture_per_class = 40;
  std::size_t stage1_posture_per_class = 40;
  std::size_t stage1_gesture_per_class = 25;
  std::uint64_t seed = 1;
};

struct TransitionReport {
  PostureLabel side = PostureLabel::TurnLeft;
  std::size_t windows = 0;
  std::vector<std::size_t> cluster_sizes;
  std::vector<std::size_t> boundaries;
  int go_cluster = 0;
  double silhouette = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  std::vector<int> labels;  ///< per-window cluster label
};

struct TrainingResult {
  RecognizerModel model;
  std::vector<TransitionReport> reports;
};

/// Windows, clusters and samples the recordings into the three dictionaries.
TrainingResult train_recognizer(const TrainingRecordings& recordings, const TrainingConfig& cfg);

// Model directory: model.json plus stage1/, postures/, gestures/ dictionaries.
void save_model(const std::filesystem::path& dir, const RecognizerModel& model);
RecognizerModel load_model(const std::filesystem::path& dir);

}  // namespace handsteer
