#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "handsteer/labels.hpp"
#include "handsteer/signal.hpp"

namespace handsteer {

/// Reference configuration of a posture: orientation angles and palm position.
struct PostureAnchor {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  Eigen::Vector3d position_mm = Eigen::Vector3d::Zero();

  Eigen::Vector3d normal() const;
  std::array<double, kChannels> features() const;
};

PostureAnchor posture_anchor(PostureLabel p);

struct ScenarioSegment {
  PostureLabel posture = PostureLabel::GoStraight;
  double dwell_s = 0.0;
};

/// A posture tour. Consecutive postures are joined by a smoothstep transition
/// of `transition_s` seconds; every transition must pass through GoStraight.
struct Scenario {
  std::vector<ScenarioSegment> segments;
  double transition_s = 0.5;
  double rate_hz = kDefaultRateHz;
  double noise = 0.0;                  ///< std-dev added to the six features
  double velocity_noise_gain = 500.0;  ///< palm velocity std-dev (mm/s) per unit noise
  std::uint64_t seed = 0;

  double duration_s() const;
};

/// Frame index ranges [begin, end) of each dwell and transition piece.
struct ScenarioPiece {
  std::size_t begin = 0;
  std::size_t end = 0;
  Label label;
};

std::vector<ScenarioPiece> scenario_pieces(const Scenario& scenario);

/// Parses "GoStraight:2,TurnLeft:3.5,GoStraight:2".
std::vector<ScenarioSegment> parse_segments(std::string_view text);
std::string format_segments(const std::vector<ScenarioSegment>& segments);

LabeledStream synth_generate(const Scenario& scenario);

/// 20 s go -> side -> go recording: 1000 frames at 50 Hz.
Scenario bilateral_scenario(PostureLabel side, double noise, std::uint64_t seed);
/// 20 s hold of one posture.
Scenario posture_scenario(PostureLabel posture, double noise, std::uint64_t seed);

struct TrainingRecordings {
  std::map<PostureLabel, LabeledStream> bilateral;  ///< keyed by the non-Go side
  std::map<PostureLabel, LabeledStream> postures;
};

struct TrainingScenarios {
  std::map<PostureLabel, Scenario> bilateral;
  std::map<PostureLabel, Scenario> postures;
};

/// The nine training scenarios with their seeds.
TrainingScenarios training_scenarios(double noise, std::uint64_t seed);
TrainingRecordings generate_training_recordings(const TrainingScenarios& scenarios);
TrainingRecordings generate_training_recordings(double noise, std::uint64_t seed);

/// Twelve 20 s evaluation streams: four go<->side oscillations followed by
/// eight random tours through all postures.
std::vector<Scenario> evaluation_scenarios(double noise, std::uint64_t seed);

}  // namespace handsteer
