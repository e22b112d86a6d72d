#include "handsteer/signal.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "handsteer/error.hpp"

namespace handsteer {

std::array<double, kChannels> SignalFrame::features() const {
  return {palm_normal.x(), palm_normal.y(), palm_normal.z(), roll, pitch, yaw};
}

FeatureFrame to_feature_frame(const SignalFrame& f) {
  return FeatureFrame{f.t, f.features(), f.speed()};
}

SignalFrame ingest_frame(std::span<const double> raw) {
  if (raw.size() != 10)
    throw Error(ErrorCode::InvalidArgument,
                "frame needs 10 values, got " + std::to_string(raw.size()));
  for (double v : raw)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "frame value not finite");

  SignalFrame f;
  f.t = raw[0];
  Eigen::Vector3d n(raw[1], raw[2], raw[3]);
  const double norm = n.norm();
  if (norm < 1e-9) throw Error(ErrorCode::ZeroNormal, "palm normal has zero length");
  f.palm_normal = n / norm;
  f.roll = raw[4];
  f.pitch = raw[5];
  f.yaw = raw[6];
  f.palm_velocity = Eigen::Vector3d(raw[7], raw[8], raw[9]);
  return f;
}

namespace {

void check_window(std::size_t got, int window) {
  if (window < 1 || got != static_cast<std::size_t>(window))
    throw Error(ErrorCode::WrongWindowLength,
                "expected " + std::to_string(window) + " frames, got " + std::to_string(got));
}

template <typename Frame>
void check_ordered(std::span<const Frame> frames) {
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (!(frames[i].t > frames[i - 1].t))
      throw Error(ErrorCode::InvalidArgument, "window frames not increasing in time");
}

std::array<double, kChannels> features_of(const SignalFrame& f) { return f.features(); }
const std::array<double, kChannels>& features_of(const FeatureFrame& f) { return f.features; }
double speed_of(const SignalFrame& f) { return f.speed(); }
double speed_of(const FeatureFrame& f) { return f.speed; }

template <typename Frame>
FeatureColumn flatten(std::span<const Frame> frames, int window, std::size_t end) {
  check_window(frames.size(), window);
  check_ordered(frames);
  FeatureColumn col;
  col.values.resize(static_cast<Eigen::Index>(kChannels) * window);
  col.window_end_index = end;
  for (int i = 0; i < window; ++i) {
    const auto feats = features_of(frames[i]);
    for (int c = 0; c < kChannels; ++c) col.values[c * window + i] = feats[c];
  }
  return col;
}

template <typename Frame>
SpeedColumn speeds(std::span<const Frame> frames, int window, std::size_t end) {
  check_window(frames.size(), window);
  SpeedColumn col;
  col.values.resize(window);
  col.window_end_index = end;
  for (int i = 0; i < window; ++i) col.values[i] = speed_of(frames[i]);
  return col;
}

}  // namespace

FeatureColumn make_window(std::span<const SignalFrame> frames, int window, std::size_t end) {
  return flatten(frames, window, end);
}

FeatureColumn make_window(std::span<const FeatureFrame> frames, int window, std::size_t end) {
  return flatten(frames, window, end);
}

SpeedColumn make_speed_window(std::span<const SignalFrame> frames, int window, std::size_t end) {
  return speeds(frames, window, end);
}

SpeedColumn make_speed_window(std::span<const FeatureFrame> frames, int window, std::size_t end) {
  return speeds(frames, window, end);
}

std::array<std::vector<double>, kChannels> unflatten(const FeatureColumn& column) {
  const int w = column.window();
  std::array<std::vector<double>, kChannels> out;
  for (int c = 0; c < kChannels; ++c) {
    out[c].assign(column.values.data() + c * w, column.values.data() + (c + 1) * w);
  }
  return out;
}

std::size_t window_count(std::size_t n_frames, int window) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "window must be positive");
  const auto w = static_cast<std::size_t>(window);
  return n_frames > w ? n_frames - w : 0;
}

std::vector<std::size_t> window_end_indices(std::size_t n_frames, int window) {
  std::vector<std::size_t> ends;
  ends.reserve(window_count(n_frames, window));
  for (auto i = static_cast<std::size_t>(window); i < n_frames; ++i) ends.push_back(i);
  return ends;
}

Eigen::MatrixXd window_matrix(std::span<const SignalFrame> frames, int window) {
  const auto ends = window_end_indices(frames.size(), window);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(kChannels) * window,
                    static_cast<Eigen::Index>(ends.size()));
  for (std::size_t j = 0; j < ends.size(); ++j) {
    const auto first = ends[j] + 1 - window;
    X.col(static_cast<Eigen::Index>(j)) =
        make_window(frames.subspan(first, window), window, ends[j]).values;
  }
  return X;
}

Eigen::MatrixXd speed_window_matrix(std::span<const SignalFrame> frames, int window) {
  const auto ends = window_end_indices(frames.size(), window);
  Eigen::MatrixXd S(window, static_cast<Eigen::Index>(ends.size()));
  for (std::size_t j = 0; j < ends.size(); ++j) {
    const auto first = ends[j] + 1 - window;
    S.col(static_cast<Eigen::Index>(j)) =
        make_speed_window(frames.subspan(first, window), window, ends[j]).values;
  }
  return S;
}

std::vector<double> resample_to_length(std::span<const double> signal, int length) {
  if (signal.size() < 2 || length < 2)
    throw Error(ErrorCode::TooShort, "resampling needs at least two samples on both sides");
  const int n = static_cast<int>(signal.size());
  if (n == length) return {signal.begin(), signal.end()};
  std::vector<double> out(length);
  out.front() = signal.front();
  out.back() = signal.back();
  for (int k = 1; k + 1 < length; ++k) {
    const double pos = static_cast<double>(k) * (n - 1) / (length - 1);
    const int i = std::min(static_cast<int>(pos), n - 2);
    const double frac = pos - i;
    out[k] = signal[i] + frac * (signal[i + 1] - signal[i]);
  }
  return out;
}

std::vector<double> zero_pad(std::span<const double> v, std::size_t m) {
  if (m < v.size())
    throw Error(ErrorCode::TargetTooSmall,
                "cannot pad length " + std::to_string(v.size()) + " to " + std::to_string(m));
  std::vector<double> out(v.begin(), v.end());
  out.resize(m, 0.0);
  return out;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, end - buf);
}

}  // namespace

void write_stream(std::ostream& out, const LabeledStream& stream) {
  if (stream.truth && stream.truth->size() != stream.frames.size())
    throw Error(ErrorCode::InvalidArgument, "truth length differs from frame count");
  for (std::size_t i = 0; i < stream.frames.size(); ++i) {
    const auto& f = stream.frames[i];
    const double vals[10] = {f.t, f.palm_normal.x(), f.palm_normal.y(), f.palm_normal.z(),
                             f.roll, f.pitch, f.yaw, f.palm_velocity.x(),
                             f.palm_velocity.y(), f.palm_velocity.z()};
    for (int k = 0; k < 10; ++k) {
      if (k) out << ' ';
      put(out, vals[k]);
    }
    if (stream.truth) out << ' ' << label_name((*stream.truth)[i]);
    out << '\n';
  }
}

LabeledStream read_stream(std::istream& in) {
  LabeledStream stream;
  std::vector<Label> truth;
  std::string line;
  std::size_t line_no = 0;
  bool any_label = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    if (toks.size() != 10 && toks.size() != 11)
      throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": expected 10 or 11 fields");
    double raw[10];
    for (int k = 0; k < 10; ++k) {
      const auto& s = toks[k];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), raw[k]);
      if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    auto frame = ingest_frame(raw);
    if (!stream.frames.empty() && !(frame.t > stream.frames.back().t))
      throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": time not increasing");
    const bool has_label = toks.size() == 11;
    if (stream.frames.empty()) any_label = has_label;
    if (has_label != any_label)
      throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": label column inconsistent");
    if (has_label) {
      auto lab = parse_label(toks[10]);
      if (!lab) throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": unknown label " + toks[10]);
      truth.push_back(*lab);
    }
    stream.frames.push_back(frame);
  }
  if (any_label) stream.truth = std::move(truth);
  return stream;
}

void save_stream(const std::filesystem::path& path, const LabeledStream& stream) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot open " + path.string() + " for writing");
  write_stream(out, stream);
  if (!out) throw Error(ErrorCode::IOFailure, "write failed: " + path.string());
}

LabeledStream load_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + path.string());
  return read_stream(in);
}

}  // namespace handsteer
