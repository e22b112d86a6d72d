#include "handsteer/service.hpp"

#include <cmath>

#include "handsteer/error.hpp"
#include "handsteer/evaluation.hpp"
#include "json.hpp"

namespace handsteer {

using nlohmann::json;

namespace {

double finite_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw Error(ErrorCode::BadMessage, std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::BadMessage, std::string("field '") + key + "' is not finite");
  return v;
}

}  // namespace

WireFrame parse_frame_message(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::BadMessage, "message is not a JSON object");
  auto type = j.find("type");
  if (type == j.end() || !type->is_string() || *type != "frame")
    throw Error(ErrorCode::BadMessage, "type must be \"frame\"");
  WireFrame f;
  f.t = finite_number(j, "t");
  auto present = j.find("present");
  if (present != j.end()) {
    if (!present->is_boolean()) throw Error(ErrorCode::BadMessage, "field 'present' must be a boolean");
    f.present = present->get<bool>();
  }
  if (!f.present) return f;
  auto feats = j.find("features");
  if (feats == j.end() || !feats->is_array())
    throw Error(ErrorCode::BadMessage, "field 'features' must be an array");
  if (feats->size() != kChannels)
    throw Error(ErrorCode::BadMessage, "expected " + std::to_string(kChannels) + " features, got " +
                                           std::to_string(feats->size()));
  for (std::size_t i = 0; i < kChannels; ++i) {
    const auto& v = (*feats)[i];
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw Error(ErrorCode::BadMessage, "feature " + std::to_string(i) + " is not a finite number");
    f.features[i] = v.get<double>();
  }
  f.speed = finite_number(j, "speed");
  if (f.speed < 0.0) throw Error(ErrorCode::BadMessage, "speed must be nonnegative");
  return f;
}

std::string frame_message(const FeatureFrame& f, bool present) {
  json j = {{"type", "frame"}, {"t", f.t}, {"present", present}};
  if (present) {
    j["features"] = f.features;
    j["speed"] = f.speed;
  }
  return j.dump();
}

std::string result_message(const StepOutput& out) {
  json j = {{"type", "result"}, {"t", out.t}, {"meta", std::string(name(out.meta))}};
  if (out.label) {
    j["label"] = label_name(*out.label);
    j["command"] = out.filtered_command->value;
    j["raw_command"] = out.raw_command->value;
    j["margin"] = out.margin;
  } else {
    j["label"] = nullptr;
  }
  return j.dump();
}

std::string error_message(ErrorCode code, std::string_view detail) {
  return json{{"type", "error"}, {"code", to_string(code)}, {"detail", detail}}.dump();
}

std::string event_from_result(std::string_view text) {
  const json j = json::parse(text);
  StepOutput out;
  out.t = j.at("t").get<double>();
  out.meta = *parse_meta(j.at("meta").get<std::string>());
  if (j.contains("command")) {
    out.label = *parse_label(j.at("label").get<std::string>());
    out.filtered_command = SteeringCommand{j.at("command").get<int>()};
    out.raw_command = SteeringCommand{j.at("raw_command").get<int>()};
    out.margin = j.at("margin").get<double>();
  }
  return format_event(out);
}

Session::Session(std::shared_ptr<const RecognizerModel> model) : recognizer_(std::move(model)) {}

std::optional<std::string> Session::handle(std::string_view message) {
  try {
    const auto f = parse_frame_message(message);
    ++frames_;
    if (!f.present) return result_message(recognizer_.step_absent(f.t));
    auto out = recognizer_.step(FeatureFrame{f.t, f.features, f.speed});
    if (!out) return std::nullopt;
    return result_message(*out);
  } catch (const Error& e) {
    return error_message(e.code(), e.what());
  }
}

std::string health_message(const RecognizerModel* model) {
  if (!model) return json{{"status", "no-model"}}.dump();
  auto blocks = [](const Dictionary& d) {
    json b = json::object();
    for (const auto& blk : d.blocks()) b[blk.label] = blk.size();
    return b;
  };
  return json{{"status", "ok"},
              {"window", model->window},
              {"channels", kChannels},
              {"classifier", std::string(name(model->classifier))},
              {"stage1", blocks(model->stage1.dict)},
              {"postures", blocks(model->postures.dict)},
              {"gestures", blocks(model->gestures.dict)}}
      .dump();
}

}  // namespace handsteer
