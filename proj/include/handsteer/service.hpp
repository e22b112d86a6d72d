#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "handsteer/error.hpp"
#include "handsteer/recognizer.hpp"

namespace handsteer {

/// Inbound frame after schema checks.
struct WireFrame {
  double t = 0.0;
  std::array<double, kChannels> features{};
  double speed = 0.0;
  bool present = true;
};

/// Parses {type:"frame", t, features:[6], speed, present}. `present` may be
/// omitted (true). Throws Error(BadMessage).
WireFrame parse_frame_message(std::string_view text);
std::string frame_message(const FeatureFrame& f, bool present = true);

std::string result_message(const StepOutput& out);
std::string error_message(ErrorCode code, std::string_view detail);

/// Rebuilds the event line from a result message, so replays can be
/// compared with format_event output.
std::string event_from_result(std::string_view result_json);

/// One hand stream. Owns its recognizer; the model is shared.
class Session {
 public:
  explicit Session(std::shared_ptr<const RecognizerModel> model);

  /// Handles one inbound message. Returns the reply, or nothing while the
  /// window is still filling. Malformed input yields an error reply and
  /// leaves the session usable.
  std::optional<std::string> handle(std::string_view message);

  std::size_t frames() const { return frames_; }

 private:
  Recognizer recognizer_;
  std::size_t frames_ = 0;
};

std::string health_message(const RecognizerModel* model);

/// WebSocket server: every connection to any path is one session; GET
/// /health answers with model metadata. One thread per connection.
class StreamServer {
 public:
  /// A null model makes every session fail with ModelMissing.
  StreamServer(std::shared_ptr<const RecognizerModel> model, std::string bind, std::uint16_t port);
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  /// Binds and starts accepting in a background thread.
  void start();
  /// Blocks until stop() is called from elsewhere.
  void wait();
  void stop();
  /// Bound port (useful with port 0).
  std::uint16_t port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
};

/// Minimal clients for scripts and tests.
std::string fetch_health(const std::string& host, std::uint16_t port);
/// Sends every frame over one WebSocket session and returns the replies in
/// order. The first `window` frames get no reply.
std::vector<std::string> replay_frames(const std::string& host, std::uint16_t port,
                                       const std::vector<FeatureFrame>& frames, int window);

}  // namespace handsteer
