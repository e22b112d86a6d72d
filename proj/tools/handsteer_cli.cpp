#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "handsteer/error.hpp"
#include "handsteer/evaluation.hpp"
#include "handsteer/recognizer.hpp"
#include "handsteer/service.hpp"
#include "handsteer/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace handsteer;

namespace {

struct Options {
  std::uint64_t seed = 1;
  int window = kDefaultWindow;
  double rate = kDefaultRateHz;
  double noise = 0.01;
  std::string classifier = "crc";
  std::optional<double> lambda;
  double osc_lambda1 = OscConfig{}.lambda1;
  double osc_lambda2 = OscConfig{}.lambda2;
  std::string model_dir;
  std::string out;
  std::string data;
  std::string report;

  // generate
  std::string preset = "evaluation";
  std::string scenario;
  double transition = 0.5;

  // eval / bench
  std::vector<std::string> inputs;
  bool with_src = false;

  // serve / replay
  std::string bind = "127.0.0.1";
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return 1;
    case ErrorCode::SingularGram:
    case ErrorCode::NonConvergence:
    case ErrorCode::ZeroColumn:
    case ErrorCode::ClusterTooSmall: return 3;
    default: return 2;
  }
}

void emit(const Options& o, const std::string& report) {
  std::cout << report << '\n';
  if (o.report.empty()) return;
  std::ofstream out(o.report);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + o.report);
  out << report << '\n';
}

std::string bilateral_file(PostureLabel side) { return "bilateral_" + std::string(name(side)) + ".txt"; }
std::string posture_file(PostureLabel p) { return "posture_" + std::string(name(p)) + ".txt"; }

void check_common(const Options& o) {
  if (o.window < 2) throw Error(ErrorCode::InvalidArgument, "--window must be >= 2");
  if (!(o.rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "--rate must be positive");
  if (!(o.noise >= 0.0)) throw Error(ErrorCode::InvalidArgument, "--noise must be nonnegative");
}

Scenario with_timing(Scenario sc, const Options& o) {
  sc.rate_hz = o.rate;
  sc.transition_s = o.transition;
  return sc;
}

json stream_entry(const std::string& path, const LabeledStream& s, int window) {
  return {{"path", path}, {"frames", s.size()}, {"windows", window_count(s.size(), window)}};
}

int run_generate(const Options& o) {
  check_common(o);
  if (o.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
  json files = json::array();
  auto write = [&](const fs::path& path, const Scenario& sc) {
    const auto stream = synth_generate(with_timing(sc, o));
    save_stream(path, stream);
    files.push_back(stream_entry(path.string(), stream, o.window));
  };

  if (!o.scenario.empty()) {
    Scenario sc;
    sc.segments = parse_segments(o.scenario);
    sc.noise = o.noise;
    sc.seed = o.seed;
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    write(o.out, sc);
  } else {
    fs::create_directories(o.out);
    if (o.preset == "training") {
      const auto sc = training_scenarios(o.noise, o.seed);
      for (const auto& [side, s] : sc.bilateral) write(fs::path(o.out) / bilateral_file(side), s);
      for (const auto& [p, s] : sc.postures) write(fs::path(o.out) / posture_file(p), s);
    } else if (o.preset == "evaluation") {
      const auto scenarios = evaluation_scenarios(o.noise, o.seed);
      for (std::size_t i = 0; i < scenarios.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "eval_%02zu.txt", i);
        write(fs::path(o.out) / buf, scenarios[i]);
      }
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown preset " + o.preset);
    }
  }
  emit(o, json{{"schema_version", kReportSchemaVersion}, {"kind", "generate"}, {"seed", o.seed},
               {"noise", o.noise}, {"files", files}}
              .dump(2));
  return 0;
}

TrainingRecordings load_recordings(const Options& o) {
  if (o.data.empty()) {
    auto sc = training_scenarios(o.noise, o.seed);
    for (auto& [side, s] : sc.bilateral) s = with_timing(s, o);
    for (auto& [p, s] : sc.postures) s = with_timing(s, o);
    return generate_training_recordings(sc);
  }
  TrainingRecordings rec;
  for (auto side : kSidePostures) {
    const auto path = fs::path(o.data) / bilateral_file(side);
    if (!fs::exists(path)) throw Error(ErrorCode::MissingRecording, path.string() + " not found");
    rec.bilateral[side] = load_stream(path);
  }
  for (auto p : kAllPostures) {
    const auto path = fs::path(o.data) / posture_file(p);
    if (!fs::exists(path)) throw Error(ErrorCode::MissingRecording, path.string() + " not found");
    rec.postures[p] = load_stream(path);
  }
  return rec;
}

ClassifierKind classifier_of(const Options& o) {
  auto k = parse_classifier(o.classifier);
  if (!k) throw Error(ErrorCode::InvalidArgument, "--classifier must be crc or src");
  return *k;
}

int run_train(const Options& o) {
  check_common(o);
  if (o.model_dir.empty()) throw Error(ErrorCode::InvalidArgument, "--model-dir is required");
  TrainingConfig cfg;
  cfg.window = o.window;
  cfg.classifier = classifier_of(o);
  cfg.lambda_stage1 = cfg.lambda_postures = cfg.lambda_gestures = o.lambda;
  cfg.clustering.osc.lambda1 = o.osc_lambda1;
  cfg.clustering.osc.lambda2 = o.osc_lambda2;
  cfg.clustering.osc.validate();
  cfg.seed = o.seed;

  const auto start = std::chrono::steady_clock::now();
  const auto rec = load_recordings(o);
  const auto result = train_recognizer(rec, cfg);
  save_model(o.model_dir, result.model);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json reports = json::array();
  for (const auto& r : result.reports)
    reports.push_back({{"side", std::string(name(r.side))},
                       {"windows", r.windows},
                       {"cluster_sizes", r.cluster_sizes},
                       {"boundaries", r.boundaries},
                       {"go_cluster", r.go_cluster},
                       {"silhouette", r.silhouette},
                       {"osc_iterations", r.iterations},
                       {"osc_converged", r.converged},
                       {"osc_objective", r.final_objective}});
  auto blocks = [](const Dictionary& d) {
    json b = json::object();
    for (const auto& blk : d.blocks()) b[blk.label] = blk.size();
    return b;
  };
  const auto& m = result.model;
  const std::string report = json{{"schema_version", kReportSchemaVersion},
                                  {"kind", "train"},
                                  {"model_dir", o.model_dir},
                                  {"seed", o.seed},
                                  {"window", m.window},
                                  {"classifier", std::string(name(m.classifier))},
                                  {"seconds", seconds},
                                  {"transitions", reports},
                                  {"blocks",
                                   {{"stage1", blocks(m.stage1.dict)},
                                    {"postures", blocks(m.postures.dict)},
                                    {"gestures", blocks(m.gestures.dict)}}}}
                                 .dump(2);
  std::ofstream(fs::path(o.model_dir) / "training_report.json") << report << '\n';
  emit(o, report);
  return 0;
}

RecognizerModel model_for(const Options& o, bool override_classifier) {
  if (o.model_dir.empty()) throw Error(ErrorCode::InvalidArgument, "--model-dir is required");
  auto model = load_model(o.model_dir);
  if (override_classifier) model.classifier = classifier_of(o);
  return model;
}

std::vector<std::pair<std::string, LabeledStream>> eval_inputs(const Options& o) {
  std::vector<std::pair<std::string, LabeledStream>> out;
  if (o.inputs.empty()) {
    const auto scenarios = evaluation_scenarios(o.noise, o.seed);
    for (std::size_t i = 0; i < scenarios.size(); ++i)
      out.emplace_back("eval_" + std::to_string(i), synth_generate(with_timing(scenarios[i], o)));
    return out;
  }
  for (const auto& p : o.inputs) {
    if (!fs::exists(p)) throw Error(ErrorCode::IOFailure, p + " not found");
    out.emplace_back(p, load_stream(p));
  }
  return out;
}

int run_eval(const Options& o, bool classifier_given) {
  const auto model = model_for(o, classifier_given);
  std::vector<StreamEvaluation> evals;
  for (auto& [path, stream] : eval_inputs(o)) {
    evals.push_back(evaluate_stream(model, stream, path));
    if (!o.out.empty()) {
      fs::create_directories(o.out);
      std::ofstream ev(fs::path(o.out) / (fs::path(path).stem().string() + ".events"));
      for (const auto& line : evals.back().events) ev << line << '\n';
      if (!ev) throw Error(ErrorCode::IOFailure, "cannot write events under " + o.out);
    }
  }
  emit(o, eval_report(evals));
  return 0;
}

int run_bench_cmd(const Options& o) {
  const auto model = model_for(o, false);
  LabeledStream stream;
  if (!o.inputs.empty()) stream = load_stream(o.inputs.front());
  else stream = synth_generate(with_timing(evaluation_scenarios(o.noise, o.seed).front(), o));
  emit(o, bench_report(run_bench(model, stream, o.with_src)));
  return 0;
}

StreamServer* g_server = nullptr;

int run_serve(const Options& o) {
  std::shared_ptr<const RecognizerModel> model;
  try {
    model = std::make_shared<const RecognizerModel>(model_for(o, false));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ModelMissing) throw;
    std::cerr << "warning: " << e.what() << "; sessions will be refused\n";
  }
  StreamServer server(model, o.bind, o.port);
  server.start();
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) std::thread([] { g_server->stop(); }).detach(); });
  std::signal(SIGTERM, [](int) { if (g_server) std::thread([] { g_server->stop(); }).detach(); });
  std::cout << json{{"schema_version", kReportSchemaVersion}, {"kind", "serve"}, {"bind", o.bind},
                    {"port", server.port()}, {"model", model != nullptr}}
                   .dump()
            << std::endl;
  server.wait();
  g_server = nullptr;
  return 0;
}

int run_replay(const Options& o) {
  if (o.inputs.size() != 1) throw Error(ErrorCode::InvalidArgument, "replay takes one stream file");
  const auto health = json::parse(fetch_health(o.host, o.port));
  if (health.value("status", "") != "ok") throw Error(ErrorCode::ModelMissing, "service has no model");
  const auto stream = load_stream(o.inputs.front());
  std::vector<FeatureFrame> frames;
  for (const auto& f : stream.frames) frames.push_back(to_feature_frame(f));
  const auto replies = replay_frames(o.host, o.port, frames, health.at("window").get<int>());
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw Error(ErrorCode::IOFailure, "cannot write " + o.out);
    out = &file;
  }
  for (const auto& r : replies) *out << event_from_result(r) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hand posture and gesture steering recognizer"};
  app.set_config("--config", "", "TOML config; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--window", o.window, "Window length W in frames")->capture_default_str();
  app.add_option("--rate", o.rate, "Frame rate (Hz) for generated streams")->capture_default_str();
  app.add_option("--noise", o.noise, "Generator noise std-dev")->capture_default_str();
  app.add_option("--classifier", o.classifier, "crc or src")->capture_default_str();
  app.add_option("--lambda", o.lambda, "Ridge weight for every dictionary (default 0.1)");
  app.add_option("--osc-lambda1", o.osc_lambda1, "OSC l1 weight")->capture_default_str();
  app.add_option("--osc-lambda2", o.osc_lambda2, "OSC sequential weight")->capture_default_str();
  app.add_option("--model-dir", o.model_dir, "Model directory");
  app.add_option("--out", o.out, "Output file or directory");
  app.add_option("--report", o.report, "Also write the JSON report here");

  auto* gen = app.add_subcommand("generate", "Write synthetic stream files");
  gen->add_option("--preset", o.preset, "training or evaluation")->capture_default_str();
  gen->add_option("--scenario", o.scenario, "Posture:seconds list, e.g. GoStraight:2,TurnLeft:3");
  gen->add_option("--transition", o.transition, "Transition length in seconds")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train a model from the nine recordings");
  train->add_option("--data", o.data, "Directory from `generate --preset training`; generated when absent");
  train->add_option("--transition", o.transition, "Transition length for generated data");

  auto* eval = app.add_subcommand("eval", "Score labelled streams");
  eval->add_option("inputs", o.inputs, "Stream files; the twelve evaluation streams when absent");

  auto* bench = app.add_subcommand("bench", "Time per-window classification");
  bench->add_option("input", o.inputs, "Stream file; one generated stream when absent")->expected(0, 1);
  bench->add_flag("--src", o.with_src, "Also time the l1 classifier");

  auto* serve = app.add_subcommand("serve", "Run the WebSocket service");
  serve->add_option("--bind", o.bind, "Listen address")->capture_default_str();
  serve->add_option("--port", o.port, "Listen port")->capture_default_str();

  auto* replay = app.add_subcommand("replay", "Send a stream file through a running service");
  replay->add_option("input", o.inputs, "Stream file")->required();
  replay->add_option("--host", o.host, "Service host")->capture_default_str();
  replay->add_option("--port", o.port, "Service port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*gen) return run_generate(o);
    if (*train) return run_train(o);
    if (*eval) return run_eval(o, app.count("--classifier") > 0);
    if (*bench) return run_bench_cmd(o);
    if (*serve) return run_serve(o);
    if (*replay) return run_replay(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
