#include "handsteer/synth.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "handsteer/error.hpp"

namespace handsteer {

Eigen::Vector3d PostureAnchor::normal() const {
  return {std::sin(roll), -std::cos(roll) * std::cos(pitch), -std::cos(roll) * std::sin(pitch)};
}

std::array<double, kChannels> PostureAnchor::features() const {
  const auto n = normal();
  return {n.x(), n.y(), n.z(), roll, pitch, yaw};
}

PostureAnchor posture_anchor(PostureLabel p) {
  switch (p) {
    case PostureLabel::GoStraight: return {0.0, 0.0, 0.0, {0.0, 200.0, 0.0}};
    case PostureLabel::TurnLeft: return {0.6, 0.0, 0.15, {-70.0, 195.0, 0.0}};
    case PostureLabel::TurnRight: return {-0.6, 0.0, -0.15, {70.0, 195.0, 0.0}};
    case PostureLabel::Stop: return {0.0, 0.7, 0.0, {0.0, 230.0, -50.0}};
    case PostureLabel::Reverse: return {0.0, -0.6, 0.0, {0.0, 170.0, 50.0}};
  }
  throw Error(ErrorCode::UnknownPosture, "unknown posture");
}

double Scenario::duration_s() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.dwell_s;
  if (segments.size() > 1) total += transition_s * static_cast<double>(segments.size() - 1);
  return total;
}

namespace {

void validate(const Scenario& sc) {
  if (sc.segments.empty()) throw Error(ErrorCode::BadScenario, "scenario has no segments");
  if (!(sc.rate_hz > 0.0)) throw Error(ErrorCode::BadScenario, "rate must be positive");
  if (!(sc.noise >= 0.0) || !(sc.velocity_noise_gain >= 0.0))
    throw Error(ErrorCode::BadScenario, "noise must be nonnegative");
  if (sc.segments.size() > 1 && !(sc.transition_s > 0.0))
    throw Error(ErrorCode::BadScenario, "transition duration must be positive");
  for (const auto& s : sc.segments)
    if (!(s.dwell_s >= 0.0) || !std::isfinite(s.dwell_s))
      throw Error(ErrorCode::BadScenario, "dwell must be a nonnegative duration");
  for (std::size_t i = 1; i < sc.segments.size(); ++i) {
    const auto from = sc.segments[i - 1].posture;
    const auto to = sc.segments[i].posture;
    if (!gesture_between(from, to))
      throw Error(ErrorCode::IllegalTransition,
                  std::string(name(from)) + " -> " + std::string(name(to)) +
                      " does not pass through GoStraight");
  }
  if (std::llround(sc.duration_s() * sc.rate_hz) < 1)
    throw Error(ErrorCode::BadScenario, "scenario produces no frames");
}

std::size_t frame_at(double seconds, double rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }
double smoothstep_rate(double u) { return 6.0 * u * (1.0 - u); }

}  // namespace

std::vector<ScenarioPiece> scenario_pieces(const Scenario& sc) {
  validate(sc);
  std::vector<ScenarioPiece> pieces;
  double clock = 0.0;
  for (std::size_t i = 0; i < sc.segments.size(); ++i) {
    if (i > 0) {
      const auto g = *gesture_between(sc.segments[i - 1].posture, sc.segments[i].posture);
      const double start = clock;
      clock += sc.transition_s;
      pieces.push_back({frame_at(start, sc.rate_hz), frame_at(clock, sc.rate_hz), Label{g}});
    }
    const double start = clock;
    clock += sc.segments[i].dwell_s;
    pieces.push_back({frame_at(start, sc.rate_hz), frame_at(clock, sc.rate_hz),
                      Label{sc.segments[i].posture}});
  }
  return pieces;
}

std::vector<ScenarioSegment> parse_segments(std::string_view text) {
  std::vector<ScenarioSegment> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::BadScenario, "segment '" + item + "' lacks ':<seconds>'");
    const auto posture = parse_posture(item.substr(0, colon));
    if (!posture) throw Error(ErrorCode::UnknownPosture, item.substr(0, colon));
    double dwell = 0.0;
    try {
      std::size_t used = 0;
      const auto rest = item.substr(colon + 1);
      dwell = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(rest);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadScenario, "bad duration in '" + item + "'");
    }
    out.push_back({*posture, dwell});
  }
  if (out.empty()) throw Error(ErrorCode::BadScenario, "empty scenario");
  return out;
}

std::string format_segments(const std::vector<ScenarioSegment>& segments) {
  std::ostringstream out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out << ',';
    out << name(segments[i].posture) << ':' << segments[i].dwell_s;
  }
  return out.str();
}

LabeledStream synth_generate(const Scenario& sc) {
  const auto pieces = scenario_pieces(sc);
  const std::size_t n = pieces.back().end;

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma_v = sc.noise * sc.velocity_noise_gain;

  LabeledStream stream;
  stream.frames.reserve(n);
  std::vector<Label> truth;
  truth.reserve(n);

  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& piece = pieces[k];
    const std::size_t seg = k / 2;
    const bool transition = std::holds_alternative<GestureLabel>(piece.label);
    const auto from = posture_anchor(sc.segments[seg].posture);
    const auto to = transition ? posture_anchor(sc.segments[seg + 1].posture) : from;
    const auto a = from.features();
    const auto b = to.features();
    const double len = static_cast<double>(piece.end - piece.begin);
    const double span_s = len / sc.rate_hz;

    for (std::size_t j = piece.begin; j < piece.end; ++j) {
      double s = 0.0;
      Eigen::Vector3d vel = Eigen::Vector3d::Zero();
      if (transition) {
        const double u = (static_cast<double>(j - piece.begin) + 0.5) / len;
        s = smoothstep(u);
        vel = (to.position_mm - from.position_mm) * smoothstep_rate(u) / span_s;
      }
      double raw[10];
      raw[0] = static_cast<double>(j) / sc.rate_hz;
      for (int c = 0; c < kChannels; ++c) raw[1 + c] = a[c] + (b[c] - a[c]) * s;
      if (sc.noise > 0.0)
        for (int c = 0; c < kChannels; ++c) raw[1 + c] += sc.noise * gauss(rng);
      for (int d = 0; d < 3; ++d) raw[7 + d] = vel[d];
      if (sigma_v > 0.0)
        for (int d = 0; d < 3; ++d) raw[7 + d] += sigma_v * gauss(rng);
      stream.frames.push_back(ingest_frame(raw));
      truth.push_back(piece.label);
    }
  }
  stream.truth = std::move(truth);
  return stream;
}

Scenario bilateral_scenario(PostureLabel side, double noise, std::uint64_t seed) {
  Scenario sc;
  sc.segments = {{PostureLabel::GoStraight, 4.75}, {side, 9.5}, {PostureLabel::GoStraight, 4.75}};
  sc.noise = noise;
  sc.seed = seed;
  return sc;
}

Scenario posture_scenario(PostureLabel posture, double noise, std::uint64_t seed) {
  Scenario sc;
  sc.segments = {{posture, 20.0}};
  sc.noise = noise;
  sc.seed = seed;
  return sc;
}

TrainingScenarios training_scenarios(double noise, std::uint64_t seed) {
  TrainingScenarios sc;
  std::uint64_t k = 0;
  for (auto side : kSidePostures) sc.bilateral.emplace(side, bilateral_scenario(side, noise, seed * 1000 + ++k));
  for (auto p : kAllPostures) sc.postures.emplace(p, posture_scenario(p, noise, seed * 1000 + ++k));
  return sc;
}

TrainingRecordings generate_training_recordings(const TrainingScenarios& sc) {
  TrainingRecordings rec;
  for (const auto& [side, s] : sc.bilateral) rec.bilateral.emplace(side, synth_generate(s));
  for (const auto& [p, s] : sc.postures) rec.postures.emplace(p, synth_generate(s));
  return rec;
}

TrainingRecordings generate_training_recordings(double noise, std::uint64_t seed) {
  return generate_training_recordings(training_scenarios(noise, seed));
}

std::vector<Scenario> evaluation_scenarios(double noise, std::uint64_t seed) {
  std::vector<Scenario> out;
  std::uint64_t k = 0;
  for (auto side : kSidePostures) {
    Scenario sc;
    sc.segments = {{PostureLabel::GoStraight, 3.0}, {side, 3.5}, {PostureLabel::GoStraight, 3.0},
                   {side, 3.5}, {PostureLabel::GoStraight, 5.0}};
    sc.noise = noise;
    sc.seed = seed * 7919 + ++k;
    out.push_back(sc);
  }

  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> weight(1.0, 2.0);
  for (int tour = 0; tour < 8; ++tour) {
    // Four side visits: 9 dwells + 8 transitions of 0.5 s = 20 s.
    std::vector<PostureLabel> order = {PostureLabel::GoStraight};
    for (int v = 0; v < 4; ++v) {
      order.push_back(kSidePostures[static_cast<std::size_t>(pick(rng))]);
      order.push_back(PostureLabel::GoStraight);
    }
    std::vector<double> w(order.size());
    double total = 0.0;
    for (auto& x : w) total += (x = weight(rng));
    Scenario sc;
    const double dwell_budget = 20.0 - 0.5 * static_cast<double>(order.size() - 1);
    for (std::size_t i = 0; i < order.size(); ++i)
      sc.segments.push_back({order[i], dwell_budget * w[i] / total});
    sc.noise = noise;
    sc.seed = seed * 7919 + ++k;
    out.push_back(sc);
  }
  return out;
}

}  // namespace handsteer
