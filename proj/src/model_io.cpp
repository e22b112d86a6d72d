#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "json.hpp"

#include "handsteer/dictionary.hpp"
#include "handsteer/error.hpp"
#include "handsteer/recognizer.hpp"

namespace handsteer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kDictionaryFormat = 1;
constexpr int kModelFormat = 1;
constexpr double kChecksumTol = 1e-8;

static_assert(std::endian::native == std::endian::little, "matrix files are little-endian");

std::uint64_t fnv1a(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadFormat, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IOFailure, "write failed for " + path.string());
}

}  // namespace

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::IOFailure, "write failed for " + path.string());
}

Eigen::MatrixXd read_matrix(const fs::path& path, Eigen::Index rows, Eigen::Index cols) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IOFailure, "cannot stat " + path.string());
  const auto expected = static_cast<std::uintmax_t>(rows * cols) * sizeof(double);
  if (size != expected)
    throw Error(ErrorCode::BadFormat, path.string() + " has " + std::to_string(size) +
                                          " bytes, expected " + std::to_string(expected));
  Eigen::MatrixXd m(rows, cols);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + path.string());
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(expected));
  if (!in) throw Error(ErrorCode::IOFailure, "short read on " + path.string());
  if (!m.allFinite()) throw Error(ErrorCode::ChecksumMismatch, path.string() + " holds non-finite values");
  return m;
}

void save_dictionary(const fs::path& dir, const Dictionary& dict, const Projector& proj) {
  if (proj.P.rows() != dict.cols() || proj.P.cols() != dict.rows())
    throw Error(ErrorCode::DimensionMismatch, "projector does not match dictionary");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IOFailure, "cannot create " + dir.string());

  write_matrix(dir / "A.mat", dict.atoms());
  write_matrix(dir / "P.mat", proj.P);
  write_matrix(dir / "norms.mat", dict.column_norms());
  if (dict.center()) write_matrix(dir / "center.mat", *dict.center());

  json blocks = json::array();
  for (const auto& b : dict.blocks()) blocks.push_back({{"label", b.label}, {"begin", b.begin}, {"end", b.end}});
  json hashes = {{"A.mat", fnv1a(dir / "A.mat")},
                 {"P.mat", fnv1a(dir / "P.mat")},
                 {"norms.mat", fnv1a(dir / "norms.mat")}};
  if (dict.center()) hashes["center.mat"] = fnv1a(dir / "center.mat");
  write_json(dir / "manifest.json", {{"format_version", kDictionaryFormat},
                                     {"rows", dict.rows()},
                                     {"cols", dict.cols()},
                                     {"lambda", dict.lambda()},
                                     {"projector_lambda", proj.lambda},
                                     {"centered", dict.centered()},
                                     {"blocks", blocks},
                                     {"fnv1a", hashes}});
}

std::pair<Dictionary, Projector> load_dictionary(const fs::path& dir) {
  const json man = read_json(dir / "manifest.json");
  try {
    if (man.at("format_version").get<int>() != kDictionaryFormat)
      throw Error(ErrorCode::BadFormat, "unsupported dictionary format in " + dir.string());
    const auto m = man.at("rows").get<Eigen::Index>();
    const auto n = man.at("cols").get<Eigen::Index>();
    if (m < 1 || n < 1) throw Error(ErrorCode::BadFormat, "bad dimensions in " + dir.string());
    const bool centered = man.at("centered").get<bool>();

    for (const auto& [file, hash] : man.at("fnv1a").items())
      if (fnv1a(dir / file) != hash.get<std::uint64_t>())
        throw Error(ErrorCode::ChecksumMismatch, (dir / file).string() + " content hash differs");

    Eigen::MatrixXd A = read_matrix(dir / "A.mat", m, n);
    Eigen::MatrixXd P = read_matrix(dir / "P.mat", n, m);
    Eigen::VectorXd norms = read_matrix(dir / "norms.mat", n, 1);
    std::optional<Eigen::VectorXd> center;
    if (centered) center = read_matrix(dir / "center.mat", m, 1);

    std::vector<ClassBlock> blocks;
    for (const auto& b : man.at("blocks"))
      blocks.push_back({b.at("label").get<std::string>(), b.at("begin").get<Eigen::Index>(),
                        b.at("end").get<Eigen::Index>()});

    auto dict = Dictionary::from_parts(std::move(A), std::move(blocks), std::move(norms),
                                       std::move(center), man.at("lambda").get<double>());
    Projector proj{std::move(P), man.at("projector_lambda").get<double>()};

    std::random_device rd;
    const auto row = static_cast<Eigen::Index>(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rd));
    const Eigen::RowVectorXd expect = projector_row(dict, row);
    const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
    if ((expect - proj.P.row(row)).cwiseAbs().maxCoeff() > kChecksumTol * scale)
      throw Error(ErrorCode::ChecksumMismatch,
                  "projector row " + std::to_string(row) + " in " + dir.string() + " does not match A");
    return {std::move(dict), std::move(proj)};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadFormat, dir.string() + "/manifest.json: " + e.what());
  }
}

void save_model(const fs::path& dir, const RecognizerModel& model) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IOFailure, "cannot create " + dir.string());
  save_dictionary(dir / "stage1", model.stage1.dict, model.stage1.proj);
  save_dictionary(dir / "postures", model.postures.dict, model.postures.proj);
  save_dictionary(dir / "gestures", model.gestures.dict, model.gestures.proj);
  json j = {{"format_version", kModelFormat},
            {"window", model.window},
            {"channels", kChannels},
            {"classifier", std::string(name(model.classifier))},
            {"src_lambda", nullptr},
            {"posture_block", model.postures.dict.blocks().front().size()},
            {"gesture_block", model.gestures.dict.blocks().front().size()}};
  if (model.src_lambda) j["src_lambda"] = *model.src_lambda;
  write_json(dir / "model.json", j);
}

RecognizerModel load_model(const fs::path& dir) {
  if (!fs::exists(dir / "model.json"))
    throw Error(ErrorCode::ModelMissing, "no model at " + dir.string());
  const json j = read_json(dir / "model.json");
  RecognizerModel model;
  std::size_t posture_block = 0, gesture_block = 0;
  try {
    if (j.at("format_version").get<int>() != kModelFormat)
      throw Error(ErrorCode::BadFormat, "unsupported model format");
    if (j.at("channels").get<int>() != kChannels)
      throw Error(ErrorCode::BadFormat, "model channel count differs");
    model.window = j.at("window").get<int>();
    const auto kind = parse_classifier(j.at("classifier").get<std::string>());
    if (!kind) throw Error(ErrorCode::BadFormat, "unknown classifier in model.json");
    model.classifier = *kind;
    if (!j.at("src_lambda").is_null()) model.src_lambda = j.at("src_lambda").get<double>();
    posture_block = j.at("posture_block").get<std::size_t>();
    gesture_block = j.at("gesture_block").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadFormat, "model.json: " + std::string(e.what()));
  }
  auto load_stage = [&](const char* sub) {
    auto [d, p] = load_dictionary(dir / sub);
    return ClassifierStage{std::move(d), std::move(p)};
  };
  model.stage1 = load_stage("stage1");
  model.postures = load_stage("postures");
  model.gestures = load_stage("gestures");
  model.validate(posture_block, gesture_block);
  return model;
}

}  // namespace handsteer
