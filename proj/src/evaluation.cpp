#include "handsteer/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <map>

#include "handsteer/error.hpp"
#include "json.hpp"

namespace handsteer {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

std::string shortest(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::vector<std::string> all_label_names() {
  std::vector<std::string> out;
  for (auto p : kAllPostures) out.emplace_back(name(p));
  for (auto g : kAllGestures) out.emplace_back(name(g));
  return out;
}

std::size_t label_slot(const Label& l) {
  if (auto p = std::get_if<PostureLabel>(&l)) return static_cast<std::size_t>(*p);
  return kAllPostures.size() + static_cast<std::size_t>(std::get<GestureLabel>(l));
}

}  // namespace

std::vector<TruthTransition> truth_transitions(const std::vector<Label>& truth) {
  std::vector<TruthTransition> out;
  for (std::size_t i = 0; i < truth.size();) {
    std::size_t j = i + 1;
    while (j < truth.size() && truth[j] == truth[i]) ++j;
    if (auto g = std::get_if<GestureLabel>(&truth[i])) out.push_back({i, j, *g});
    i = j;
  }
  return out;
}

std::vector<WindowTruth> window_truth(const std::vector<Label>& truth, int window) {
  const auto transitions = truth_transitions(truth);
  const auto W = static_cast<std::size_t>(window);
  std::vector<WindowTruth> out;
  for (auto e : window_end_indices(truth.size(), window)) {
    const std::size_t first = e + 1 - W;
    WindowTruth wt;
    wt.end_index = e;
    std::optional<Label> gesture;
    for (const auto& tr : transitions) {
      const auto lo = std::max(first, tr.begin);
      const auto hi = std::min(e + 1, tr.end);
      if (hi > lo && 2 * (hi - lo) > W) gesture = tr.gesture;
      if (e + W >= tr.begin && e <= tr.end + W) wt.in_band = true;
    }
    if (gesture) {
      wt.label = *gesture;
    } else {
      std::array<std::size_t, kAllPostures.size()> count{};
      for (std::size_t i = first; i <= e; ++i)
        if (auto p = std::get_if<PostureLabel>(&truth[i])) ++count[static_cast<std::size_t>(*p)];
      // Ties go to the posture seen last in the window.
      std::size_t best = 0;
      PostureLabel label = PostureLabel::GoStraight;
      for (std::size_t i = first; i <= e; ++i)
        if (auto p = std::get_if<PostureLabel>(&truth[i]); p && count[static_cast<std::size_t>(*p)] >= best) {
          best = count[static_cast<std::size_t>(*p)];
          label = *p;
        }
      if (best == 0) wt.label = std::get<GestureLabel>(truth[e]);
      else wt.label = label;
    }
    out.push_back(wt);
  }
  return out;
}

std::string format_event(const StepOutput& out) {
  std::string s = shortest(out.t);
  s += ' ';
  s += name(out.meta);
  s += ' ';
  s += out.label ? label_name(*out.label) : "-";
  s += ' ';
  s += out.raw_command ? std::to_string(out.raw_command->value) : "-";
  s += ' ';
  s += out.filtered_command ? std::to_string(out.filtered_command->value) : "-";
  s += ' ';
  s += out.label ? shortest(out.margin) : "-";
  return s;
}

ConfusionMatrix::ConfusionMatrix() : labels(all_label_names()) {
  count.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
}

void ConfusionMatrix::add(const Label& truth, const Label& predicted) {
  ++count[label_slot(truth)][label_slot(predicted)];
}

namespace {
double accuracy(std::size_t errors, std::size_t n) {
  return n ? 1.0 - static_cast<double>(errors) / static_cast<double>(n) : 0.0;
}
}  // namespace

double StreamEvaluation::raw_accuracy() const { return accuracy(raw_errors, windows_scored); }
double StreamEvaluation::filtered_accuracy() const { return accuracy(filtered_errors, windows_scored); }
double StreamEvaluation::raw_accuracy_all() const { return accuracy(raw_errors_all, outputs.size()); }
double StreamEvaluation::filtered_accuracy_all() const {
  return accuracy(filtered_errors_all, outputs.size());
}

StreamEvaluation evaluate_stream(const RecognizerModel& model, const LabeledStream& stream,
                                 std::string name) {
  StreamEvaluation ev;
  ev.name = std::move(name);
  ev.frames = stream.frames.size();

  // Non-owning handle: the model outlives the recognizer here.
  Recognizer rec(std::shared_ptr<const RecognizerModel>(&model, [](const RecognizerModel*) {}));
  std::vector<double> per_window;
  per_window.reserve(window_count(stream.frames.size(), model.window));
  const auto start = Clock::now();
  for (const auto& f : stream.frames) {
    const auto t0 = Clock::now();
    auto out = rec.step(f);
    if (!out) continue;
    per_window.push_back(seconds_since(t0));
    ev.outputs.push_back(std::move(*out));
  }
  ev.seconds_total = seconds_since(start);
  ev.seconds_per_window_median = median(per_window);
  for (const auto& o : ev.outputs) ev.events.push_back(format_event(o));

  if (!stream.truth) return ev;
  if (stream.truth->size() != stream.frames.size())
    throw Error(ErrorCode::DimensionMismatch, "truth length differs from frame count");
  ev.labelled = true;
  const auto truth = window_truth(*stream.truth, model.window);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& o = ev.outputs[i];
    const bool raw_ok = *o.label == truth[i].label;
    const bool filtered_ok = *o.filtered_command == map_to_command(truth[i].label);
    ev.confusion_all.add(truth[i].label, *o.label);
    ev.raw_errors_all += !raw_ok;
    ev.filtered_errors_all += !filtered_ok;
    if (truth[i].in_band) continue;
    ++ev.windows_scored;
    ev.confusion.add(truth[i].label, *o.label);
    ev.raw_errors += !raw_ok;
    ev.filtered_errors += !filtered_ok;
  }
  return ev;
}

BenchResult run_bench(const RecognizerModel& model, const LabeledStream& stream, bool with_src) {
  BenchResult b;
  std::vector<FeatureFrame> frames;
  for (const auto& f : stream.frames) frames.push_back(to_feature_frame(f));
  const auto ends = window_end_indices(frames.size(), model.window);
  b.windows = ends.size();

  auto t0 = Clock::now();
  for (const auto* s : {&model.stage1, &model.postures, &model.gestures}) precompute_projection(s->dict);
  b.precompute_seconds = seconds_since(t0);

  auto time_with = [&](ClassifierKind kind, std::vector<std::string>& labels, double& total,
                       double& med) {
    RecognizerModel m = model;
    m.classifier = kind;
    std::vector<double> per;
    per.reserve(ends.size());
    const auto start = Clock::now();
    for (auto e : ends) {
      const std::span<const FeatureFrame> win(frames.data() + e + 1 - model.window,
                                              static_cast<std::size_t>(model.window));
      const auto t = Clock::now();
      const auto d = decide_window(m, win);
      per.push_back(seconds_since(t));
      labels.push_back(label_name(d.label));
    }
    total = seconds_since(start);
    med = median(per);
  };
  time_with(ClassifierKind::Crc, b.crc_labels, b.crc_total_seconds, b.crc_median_seconds);
  if (with_src) {
    double total = 0.0, med = 0.0;
    time_with(ClassifierKind::Src, b.src_labels, total, med);
    b.src_total_seconds = total;
    b.src_median_seconds = med;
  }
  return b;
}

std::string eval_report(const std::vector<StreamEvaluation>& streams) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "eval";
  json arr = json::array();
  std::size_t windows = 0, scored = 0, raw_err = 0, filt_err = 0;
  double seconds = 0.0;
  bool all_labelled = !streams.empty();
  for (const auto& s : streams) {
    json e = {{"name", s.name},
              {"frames", s.frames},
              {"windows", s.outputs.size()},
              {"seconds_total", s.seconds_total},
              {"seconds_per_window_median", s.seconds_per_window_median}};
    windows += s.outputs.size();
    seconds += s.seconds_total;
    if (s.labelled) {
      e["windows_scored"] = s.windows_scored;
      e["raw_errors"] = s.raw_errors;
      e["filtered_errors"] = s.filtered_errors;
      e["raw_accuracy"] = s.raw_accuracy();
      e["filtered_accuracy"] = s.filtered_accuracy();
      e["raw_accuracy_all"] = s.raw_accuracy_all();
      e["filtered_accuracy_all"] = s.filtered_accuracy_all();
      e["confusion"] = {{"labels", s.confusion.labels}, {"count", s.confusion.count}};
      e["confusion_all"] = {{"labels", s.confusion_all.labels}, {"count", s.confusion_all.count}};
      scored += s.windows_scored;
      raw_err += s.raw_errors;
      filt_err += s.filtered_errors;
    } else {
      all_labelled = false;
    }
    arr.push_back(std::move(e));
  }
  j["streams"] = std::move(arr);
  j["windows"] = windows;
  j["seconds_total"] = seconds;
  if (all_labelled) {
    j["windows_scored"] = scored;
    j["raw_errors"] = raw_err;
    j["filtered_errors"] = filt_err;
    j["raw_accuracy"] = accuracy(raw_err, scored);
    j["filtered_accuracy"] = accuracy(filt_err, scored);
  }
  return j.dump(2);
}

std::string bench_report(const BenchResult& b) {
  json j = {{"schema_version", kReportSchemaVersion},
            {"kind", "bench"},
            {"windows", b.windows},
            {"precompute_seconds", b.precompute_seconds},
            {"crc_total_seconds", b.crc_total_seconds},
            {"crc_median_seconds", b.crc_median_seconds}};
  if (b.src_total_seconds) {
    j["src_total_seconds"] = *b.src_total_seconds;
    j["src_median_seconds"] = *b.src_median_seconds;
    j["src_over_crc"] = *b.src_total_seconds / std::max(b.crc_total_seconds, 1e-12);
  }
  return j.dump(2);
}

}  // namespace handsteer
