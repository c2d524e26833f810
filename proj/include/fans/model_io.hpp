#pragma once

// Versioned JSON model files.
//
// Doubles are written in shortest round-trip form. A checksum over the IEEE
// bit patterns of every stored number (in document order) detects files
// whose numbers were rounded or edited.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fans/error.hpp"
#include "fans/fans.hpp"
#include "fans/rng.hpp"

namespace fans::io {

inline constexpr int kFormatVersion = 1;

namespace detail {

class NumericDigest {
 public:
  void add(double v) { add_bits(std::bit_cast<std::uint64_t>(v)); }
  void add(std::uint64_t v) { add_bits(v); }

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  void add_bits(std::uint64_t bits) {
    for (int b = 0; b < 8; ++b) {
      h_ ^= (bits >> (8 * b)) & 0xFFu;
      h_ *= 0x100000001B3ull;
    }
  }

  std::uint64_t h_ = 0xCBF29CE484222325ull;
};

inline std::string_view loss_name(plr::CvLoss loss) {
  return loss == plr::CvLoss::kMisclassification ? "misclassification" : "deviance";
}

inline plr::CvLoss parse_loss(const std::string& name) {
  if (name == "misclassification") return plr::CvLoss::kMisclassification;
  if (name == "deviance") return plr::CvLoss::kDeviance;
  throw Error(ErrorCode::kSchema, "unknown cv_loss '" + name + "'");
}

inline nlohmann::json vector_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Vector json_vector(const nlohmann::json& arr) {
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr.at(i).get<double>();
  return v;
}

// Numbers covered by the checksum, in a fixed order.
inline std::string digest(const nlohmann::json& doc) {
  NumericDigest d;
  const auto& cfg = doc.at("config");
  d.add(cfg.at("splits").get<std::uint64_t>());
  d.add(cfg.at("floor").get<double>());
  d.add(cfg.at("lambda_count").get<std::uint64_t>());
  d.add(cfg.at("lambda_ratio").get<double>());
  d.add(cfg.at("cv_folds").get<std::uint64_t>());
  d.add(cfg.at("seed").get<std::uint64_t>());
  d.add(doc.at("p").get<std::uint64_t>());
  for (const auto& sub : doc.at("submodels")) {
    d.add(sub.at("lambda").get<double>());
    d.add(sub.at("intercept").get<double>());
    for (const auto& c : sub.at("coefficients")) d.add(c.get<double>());
    for (const char* cls : {"class1", "class0"}) {
      for (const auto& dens : sub.at("densities").at(cls)) {
        d.add(dens.at("bandwidth").get<double>());
        d.add(dens.at("floor").get<double>());
        for (const auto& s : dens.at("samples")) d.add(s.get<double>());
      }
    }
  }
  return d.hex();
}

}  // namespace detail

inline nlohmann::json to_json(const FansModel& model) {
  using nlohmann::json;
  const auto& c = model.config;
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["variant"] = std::string(to_string(c.variant));
  doc["config"] = {
      {"variant", std::string(to_string(c.variant))},
      {"splits", c.splits},
      {"balanced_pairing", c.balanced_pairing},
      {"floor", c.floor},
      {"bandwidth", c.bandwidth.name()},
      {"grid_cache", c.grid_cache},
      {"lambda_count", c.lambda_count},
      {"lambda_ratio", c.lambda_ratio},
      {"cv_folds", c.cv_folds},
      {"cv_loss", std::string(detail::loss_name(c.cv_loss))},
      {"seed", c.seed},
      {"workers", c.workers},
      {"rng", std::string(rng::kGeneratorName)},
  };
  doc["p"] = model.features;
  auto subs = json::array();
  for (const auto& sub : model.submodels) {
    json densities;
    for (const auto& [name, list] : {std::pair{"class1", &sub.densities.class1}, std::pair{"class0", &sub.densities.class0}}) {
      auto arr = json::array();
      for (const auto& d : *list) {
        arr.push_back({{"bandwidth", d.bandwidth()}, {"floor", d.floor()}, {"samples", d.samples()}});
      }
      densities[name] = std::move(arr);
    }
    const auto& r = sub.regression;
    subs.push_back({
        {"lambda", r.lambda},
        {"intercept", r.intercept},
        {"coefficients", detail::vector_json(r.coefficients)},
        {"standardization", {{"mean", detail::vector_json(r.standardization.mean)},
                             {"scale", detail::vector_json(r.standardization.scale)}}},
        {"densities", std::move(densities)},
    });
  }
  doc["submodels"] = std::move(subs);
  doc["checksum"] = detail::digest(doc);
  return doc;
}

inline FansModel from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("format_version")) throw Error(ErrorCode::kSchema, "missing format_version");
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::kVersion, "model format_version " + std::to_string(version) + " is not supported (expected " +
                                           std::to_string(kFormatVersion) + ")");
    }
    if (doc.at("checksum").get<std::string>() != detail::digest(doc)) {
      throw Error(ErrorCode::kChecksum, "model checksum mismatch: stored numbers were altered or rounded");
    }
    const auto& cfg = doc.at("config");
    if (cfg.at("rng").get<std::string>() != rng::kGeneratorName) {
      throw Error(ErrorCode::kSchema, "model was written with generator '" + cfg.at("rng").get<std::string>() + "'");
    }
    FansModel model;
    auto& c = model.config;
    c.variant = parse_variant(doc.at("variant").get<std::string>());
    c.splits = cfg.at("splits").get<std::size_t>();
    c.balanced_pairing = cfg.at("balanced_pairing").get<bool>();
    c.floor = cfg.at("floor").get<double>();
    c.bandwidth = kde::BandwidthRule::parse(cfg.at("bandwidth").get<std::string>());
    c.grid_cache = cfg.at("grid_cache").get<bool>();
    c.lambda_count = cfg.at("lambda_count").get<std::size_t>();
    c.lambda_ratio = cfg.at("lambda_ratio").get<double>();
    c.cv_folds = cfg.at("cv_folds").get<std::size_t>();
    c.cv_loss = detail::parse_loss(cfg.at("cv_loss").get<std::string>());
    c.seed = cfg.at("seed").get<std::uint64_t>();
    c.workers = cfg.at("workers").get<std::size_t>();
    model.features = doc.at("p").get<std::size_t>();

    const std::size_t width = augmented_width(model.features, c.variant);
    for (const auto& sub : doc.at("submodels")) {
      auto read_list = [&](const char* cls) {
        std::vector<kde::MarginalDensity> list;
        for (const auto& d : sub.at("densities").at(cls)) {
          list.emplace_back(d.at("samples").get<std::vector<double>>(), d.at("bandwidth").get<double>(),
                            d.at("floor").get<double>(), c.grid_cache);
        }
        if (list.size() != model.features) throw Error(ErrorCode::kSchema, "density count does not match p");
        return list;
      };
      DensityPair dp(read_list("class1"), read_list("class0"));
      plr::PlrModel r;
      r.lambda = sub.at("lambda").get<double>();
      r.intercept = sub.at("intercept").get<double>();
      r.coefficients = detail::json_vector(sub.at("coefficients"));
      r.standardization.mean = detail::json_vector(sub.at("standardization").at("mean"));
      r.standardization.scale = detail::json_vector(sub.at("standardization").at("scale"));
      if (r.dimension() != width) throw Error(ErrorCode::kSchema, "coefficient count does not match variant and p");
      model.submodels.push_back({std::move(dp), std::move(r)});
    }
    if (model.submodels.size() != c.splits) throw Error(ErrorCode::kSchema, "sub-model count does not match splits");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const FansModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << to_json(model).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

inline FansModel parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("model file is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

inline FansModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace fans::io
