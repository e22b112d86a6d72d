#include "handsteer/recognizer.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "handsteer/error.hpp"

namespace handsteer {

std::string_view name(ClassifierKind k) { return k == ClassifierKind::Crc ? "crc" : "src"; }

std::optional<ClassifierKind> parse_classifier(std::string_view s) {
  if (s == "crc") return ClassifierKind::Crc;
  if (s == "src") return ClassifierKind::Src;
  return std::nullopt;
}

void RecognizerModel::validate(std::size_t posture_block, std::size_t gesture_block) const {
  if (window < 2) throw Error(ErrorCode::BadFormat, "window must be >= 2");
  const auto W = static_cast<Eigen::Index>(window);
  if (stage1.dict.rows() != W)
    throw Error(ErrorCode::BadFormat, "stage-1 rows must equal the window");
  if (stage1.dict.class_count() != 2 || stage1.dict.blocks()[0].label != kStagePosture ||
      stage1.dict.blocks()[1].label != kStageTransition)
    throw Error(ErrorCode::BadFormat, "stage-1 needs exactly the Posture and Transition blocks");
  if (postures.dict.rows() != kChannels * W || gestures.dict.rows() != kChannels * W)
    throw Error(ErrorCode::BadFormat, "feature dictionaries must have 6W rows");
  if (postures.dict.class_count() != kAllPostures.size())
    throw Error(ErrorCode::BadFormat, "posture dictionary needs five classes");
  for (std::size_t i = 0; i < kAllPostures.size(); ++i) {
    const auto& b = postures.dict.blocks()[i];
    if (b.label != name(kAllPostures[i]) || static_cast<std::size_t>(b.size()) != posture_block)
      throw Error(ErrorCode::BadFormat, "posture block " + b.label + " malformed");
  }
  if (gestures.dict.class_count() != kAllGestures.size())
    throw Error(ErrorCode::BadFormat, "gesture dictionary needs eight classes");
  for (std::size_t i = 0; i < kAllGestures.size(); ++i) {
    const auto& b = gestures.dict.blocks()[i];
    if (b.label != name(kAllGestures[i]) || static_cast<std::size_t>(b.size()) != gesture_block)
      throw Error(ErrorCode::BadFormat, "gesture block " + b.label + " malformed");
  }
  for (const auto* s : {&stage1, &postures, &gestures})
    if (s->proj.P.rows() != s->dict.cols() || s->proj.P.cols() != s->dict.rows())
      throw Error(ErrorCode::BadFormat, "projector does not match its dictionary");
}

RecognitionResult classify_stage(const ClassifierStage& stage, const Eigen::VectorXd& y,
                                 ClassifierKind kind, std::optional<double> src_lambda) {
  if (kind == ClassifierKind::Crc) return crc_classify(y, stage.dict, stage.proj);
  return src_classify(y, stage.dict, src_lambda);
}

MetaState stage1_decide(const SpeedColumn& speeds, const RecognizerModel& model) {
  if (speeds.values.size() != model.window)
    throw Error(ErrorCode::WrongWindowLength, "speed window has length " +
                                                  std::to_string(speeds.values.size()));
  const auto r = classify_stage(model.stage1, speeds.values, model.classifier, model.src_lambda);
  return model.stage1.dict.blocks()[static_cast<std::size_t>(r.label)].label == kStageTransition
             ? MetaState::TransitionState
             : MetaState::PostureState;
}

std::pair<PostureLabel, ClassResiduals> classify_posture(const FeatureColumn& w,
                                                         const RecognizerModel& model) {
  auto r = classify_stage(model.postures, w.values, model.classifier, model.src_lambda);
  const auto& label = model.postures.dict.blocks()[static_cast<std::size_t>(r.label)].label;
  return {*parse_posture(label), std::move(r.residuals)};
}

std::pair<GestureLabel, ClassResiduals> classify_gesture(const FeatureColumn& w,
                                                         const RecognizerModel& model) {
  auto r = classify_stage(model.gestures, w.values, model.classifier, model.src_lambda);
  const auto& label = model.gestures.dict.blocks()[static_cast<std::size_t>(r.label)].label;
  return {*parse_gesture(label), std::move(r.residuals)};
}

SteeringCommand CommandFilter::push(SteeringCommand c) {
  ring_.push_back(c);
  if (ring_.size() > kCapacity) ring_.pop_front();
  std::array<int, 6> count{};
  for (auto v : ring_) ++count[static_cast<std::size_t>(v.value)];
  int best = 0;
  for (int v : count) best = std::max(best, v);
  for (auto it = ring_.rbegin(); it != ring_.rend(); ++it)
    if (count[static_cast<std::size_t>(it->value)] == best) return *it;
  return c;
}

SteeringCommand filter_command(CommandFilter& filter, SteeringCommand c) { return filter.push(c); }

WindowDecision decide_window(const RecognizerModel& model, std::span<const FeatureFrame> frames) {
  const auto speeds = make_speed_window(frames, model.window);
  const auto column = make_window(frames, model.window);
  WindowDecision d;
  d.meta = stage1_decide(speeds, model);
  if (d.meta == MetaState::PostureState) {
    auto [p, res] = classify_posture(column, model);
    d.label = p;
    d.margin = res.margin;
  } else {
    auto [g, res] = classify_gesture(column, model);
    d.label = g;
    d.margin = res.margin;
  }
  d.command = map_to_command(d.label);
  return d;
}

Recognizer::Recognizer(std::shared_ptr<const RecognizerModel> model) : model_(std::move(model)) {
  if (!model_) throw Error(ErrorCode::ModelMissing, "recognizer needs a model");
}

void Recognizer::reset() {
  buffer_.clear();
  seen_ = 0;
  filter_.clear();
}

std::optional<StepOutput> Recognizer::step(const FeatureFrame& frame) {
  const auto W = static_cast<std::size_t>(model_->window);
  if (!buffer_.empty() && !(frame.t > buffer_.back().t))
    throw Error(ErrorCode::InvalidArgument, "frame time not increasing");
  buffer_.push_back(frame);
  if (buffer_.size() > W) buffer_.pop_front();
  if (++seen_ <= W) return std::nullopt;

  const std::vector<FeatureFrame> window(buffer_.begin(), buffer_.end());
  const auto d = decide_window(*model_, window);
  StepOutput out;
  out.t = frame.t;
  out.meta = d.meta;
  out.label = d.label;
  out.raw_command = d.command;
  out.filtered_command = filter_.push(d.command);
  out.margin = d.margin;
  return out;
}

StepOutput Recognizer::step_absent(double t) {
  reset();
  StepOutput out;
  out.t = t;
  out.meta = MetaState::NoHand;
  return out;
}

namespace {

std::vector<Eigen::Index> sample_indices(Eigen::Index n, std::size_t count, std::mt19937_64& rng) {
  if (static_cast<std::size_t>(n) < count)
    throw Error(ErrorCode::ClusterTooSmall, "need " + std::to_string(count) + " windows, have " +
                                                std::to_string(n));
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<Eigen::Index> out;
  std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng);
  return out;
}

void append(std::vector<Eigen::VectorXd>& cols, std::vector<std::string>& labels,
            const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& idx, const std::string& label) {
  for (auto j : idx) {
    cols.emplace_back(X.col(j));
    labels.push_back(label);
  }
}

ClassifierStage make_stage(const std::vector<Eigen::VectorXd>& cols,
                           const std::vector<std::string>& labels,
                           const std::vector<std::string>& order, std::optional<double> lambda,
                           bool center) {
  auto dict = build_dictionary(cols, labels, lambda.value_or(kDefaultRidgeLambda), center, order);
  auto proj = precompute_projection(dict);
  return ClassifierStage{std::move(dict), std::move(proj)};
}

template <typename Enum, std::size_t N>
std::vector<std::string> names_of(const std::array<Enum, N>& values) {
  std::vector<std::string> out;
  for (auto v : values) out.emplace_back(name(v));
  return out;
}

}  // namespace

TrainingResult train_recognizer(const TrainingRecordings& rec, const TrainingConfig& cfg) {
  const int W = cfg.window;
  if (W < 2) throw Error(ErrorCode::InvalidArgument, "window must be >= 2");
  for (auto side : kSidePostures)
    if (!rec.bilateral.count(side))
      throw Error(ErrorCode::MissingRecording, "no go<->" + std::string(name(side)) + " recording");
  for (auto p : kAllPostures)
    if (!rec.postures.count(p))
      throw Error(ErrorCode::MissingRecording, "no " + std::string(name(p)) + " posture recording");

  std::mt19937_64 rng(cfg.seed);
  TrainingResult result;

  std::vector<Eigen::VectorXd> gesture_cols, stage1_cols;
  std::vector<std::string> gesture_labels, stage1_labels;
  std::vector<Eigen::VectorXd> transition_speed_cols;

  for (auto side : kSidePostures) {
    const auto& frames = rec.bilateral.at(side).frames;
    const Eigen::MatrixXd X = window_matrix(frames, W);
    const Eigen::MatrixXd S = speed_window_matrix(frames, W);

    ClusteringOptions copts = cfg.clustering;
    copts.kmeans.seed = rng();
    const auto clustering = cluster_training_signal(X, 2, copts);
    const auto& labels = clustering.assignment.labels;

    // Recordings start at GoStraight, so the first window names the Go cluster.
    const int go_cluster = labels.front();
    const int side_cluster = 1 - go_cluster;
    const auto leave = *gesture_between(PostureLabel::GoStraight, side);
    const auto back = *gesture_between(side, PostureLabel::GoStraight);

    const auto reps = select_representatives(clustering.assignment, cfg.gesture_per_cluster, rng());
    // A cluster holds the windows where the hand ends up, which is the
    // gesture's target posture.
    append(gesture_cols, gesture_labels, X, reps[static_cast<std::size_t>(side_cluster)],
           std::string(name(leave)));
    append(gesture_cols, gesture_labels, X, reps[static_cast<std::size_t>(go_cluster)],
           std::string(name(back)));

    // Stage-1 transition samples: windows within W/2 of a cluster boundary.
    std::set<Eigen::Index> near_leave, near_back;
    const Eigen::Index half = W / 2;
    for (auto b : clustering.boundaries) {
      const auto bi = static_cast<Eigen::Index>(b);
      auto& pool = labels[b - 1] == go_cluster ? near_leave : near_back;
      for (Eigen::Index j = std::max<Eigen::Index>(0, bi - half); j <= std::min(X.cols() - 1, bi + half); ++j)
        pool.insert(j);
    }
    for (const auto* pool : {&near_leave, &near_back}) {
      const std::vector<Eigen::Index> cand(pool->begin(), pool->end());
      if (cand.size() < cfg.stage1_gesture_per_class)
        throw Error(ErrorCode::ClusterTooSmall,
                    "only " + std::to_string(cand.size()) + " boundary windows for " +
                        std::string(name(pool == &near_leave ? leave : back)));
      std::vector<Eigen::Index> chosen;
      std::sample(cand.begin(), cand.end(), std::back_inserter(chosen), cfg.stage1_gesture_per_class, rng);
      for (auto j : chosen) transition_speed_cols.emplace_back(S.col(j));
    }

    TransitionReport report;
    report.side = side;
    report.windows = static_cast<std::size_t>(X.cols());
    report.cluster_sizes = clustering.assignment.sizes();
    report.boundaries = clustering.boundaries;
    report.go_cluster = go_cluster;
    report.silhouette = clustering.silhouette;
    report.iterations = clustering.osc_iterations;
    report.converged = clustering.osc_converged;
    report.final_objective = clustering.final_objective;
    report.labels = labels;
    result.reports.push_back(std::move(report));
  }

  std::vector<Eigen::VectorXd> posture_cols;
  std::vector<std::string> posture_labels;
  for (auto p : kAllPostures) {
    const auto& frames = rec.postures.at(p).frames;
    const Eigen::MatrixXd X = window_matrix(frames, W);
    const Eigen::MatrixXd S = speed_window_matrix(frames, W);
    append(posture_cols, posture_labels, X, sample_indices(X.cols(), cfg.posture_per_class, rng),
           std::string(name(p)));
    append(stage1_cols, stage1_labels, S, sample_indices(S.cols(), cfg.stage1_posture_per_class, rng),
           kStagePosture);
  }
  for (auto& c : transition_speed_cols) {
    stage1_cols.push_back(std::move(c));
    stage1_labels.push_back(kStageTransition);
  }

  auto& model = result.model;
  model.window = W;
  model.classifier = cfg.classifier;
  model.src_lambda = cfg.src_lambda;
  model.stage1 = make_stage(stage1_cols, stage1_labels, {kStagePosture, kStageTransition},
                            cfg.lambda_stage1, cfg.center_stage1);
  model.postures = make_stage(posture_cols, posture_labels, names_of(kAllPostures),
                              cfg.lambda_postures, cfg.center_features);
  model.gestures = make_stage(gesture_cols, gesture_labels, names_of(kAllGestures),
                              cfg.lambda_gestures, cfg.center_features);
  model.validate(cfg.posture_per_class, cfg.gesture_per_cluster);
  return result;
}

}  // namespace handsteer
