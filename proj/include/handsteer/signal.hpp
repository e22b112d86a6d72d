#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "handsteer/labels.hpp"

namespace handsteer {

/// Feature channels per frame: (n_x, n_y, n_z, roll, pitch, yaw).
inline constexpr int kChannels = 6;
inline constexpr int kDefaultWindow = 25;
inline constexpr double kDefaultRateHz = 50.0;

/// One sample of the hand signal. Angles in radians, velocity in mm/s.
struct SignalFrame {
  double t = 0.0;
  Eigen::Vector3d palm_normal{0.0, -1.0, 0.0};
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  Eigen::Vector3d palm_velocity = Eigen::Vector3d::Zero();

  std::array<double, kChannels> features() const;
  double speed() const { return palm_velocity.norm(); }
};

/// What the recognizer consumes: six features and the scalar palm speed.
/// Service clients send these directly.
struct FeatureFrame {
  double t = 0.0;
  std::array<double, kChannels> features{};
  double speed = 0.0;
};

FeatureFrame to_feature_frame(const SignalFrame& f);

/// Flattened window, channel-major: channel c occupies [c*W, (c+1)*W).
struct FeatureColumn {
  Eigen::VectorXd values;
  std::size_t window_end_index = 0;

  int window() const { return static_cast<int>(values.size()) / kChannels; }
};

/// Palm speed magnitudes over one window.
struct SpeedColumn {
  Eigen::VectorXd values;
  std::size_t window_end_index = 0;
};

struct LabeledStream {
  std::vector<SignalFrame> frames;
  std::optional<std::vector<Label>> truth;

  std::size_t size() const { return frames.size(); }
};

/// Builds a frame from `t nx ny nz roll pitch yaw vx vy vz`; the normal is
/// rescaled to unit length.
SignalFrame ingest_frame(std::span<const double> raw);

FeatureColumn make_window(std::span<const SignalFrame> frames, int window,
                          std::size_t window_end_index = 0);
FeatureColumn make_window(std::span<const FeatureFrame> frames, int window,
                          std::size_t window_end_index = 0);
SpeedColumn make_speed_window(std::span<const SignalFrame> frames, int window,
                              std::size_t window_end_index = 0);
SpeedColumn make_speed_window(std::span<const FeatureFrame> frames, int window,
                              std::size_t window_end_index = 0);

/// Inverse of the channel-major flatten.
std::array<std::vector<double>, kChannels> unflatten(const FeatureColumn& column);

/// Number of stride-1 windows over n frames. The first frame is never a
/// window end, so a 1000-frame stream at W=25 yields 975 windows.
std::size_t window_count(std::size_t n_frames, int window);
/// Window end indices W..n-1.
std::vector<std::size_t> window_end_indices(std::size_t n_frames, int window);

/// Feature windows of a stream as the columns of a (6W x count) matrix.
Eigen::MatrixXd window_matrix(std::span<const SignalFrame> frames, int window);
/// Speed windows of a stream as the columns of a (W x count) matrix.
Eigen::MatrixXd speed_window_matrix(std::span<const SignalFrame> frames, int window);

std::vector<double> resample_to_length(std::span<const double> signal, int length);
std::vector<double> zero_pad(std::span<const double> v, std::size_t m);

void write_stream(std::ostream& out, const LabeledStream& stream);
LabeledStream read_stream(std::istream& in);
void save_stream(const std::filesystem::path& path, const LabeledStream& stream);
LabeledStream load_stream(const std::filesystem::path& path);

}  // namespace handsteer
