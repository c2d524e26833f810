#pragma once

// Repeated train/test comparisons of FANS, FANS2, raw-feature PLR and kernel
// Naive Bayes on simulated designs or a user-supplied labeled CSV.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fans/baselines.hpp"
#include "fans/dataset.hpp"
#include "fans/error.hpp"
#include "fans/fans.hpp"
#include "fans/metrics.hpp"
#include "fans/parallel.hpp"
#include "fans/rng.hpp"
#include "fans/simgen.hpp"

namespace fans::bench {

enum class Method { kFans, kFans2, kPlr, kNb };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kFans: return "fans";
    case Method::kFans2: return "fans2";
    case Method::kPlr: return "plr";
    case Method::kNb: return "nb";
  }
  return "?";
}

inline std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto name = list.substr(0, comma);
    bool found = false;
    for (Method m : {Method::kFans, Method::kFans2, Method::kPlr, Method::kNb}) {
      if (name == to_string(m)) {
        out.push_back(m);
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::kConfig, "unknown method '" + std::string(name) + "'");
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw Error(ErrorCode::kConfig, "no methods requested");
  return out;
}

struct BenchConfig {
  std::optional<sim::SimSpec> simulation;  // either a design ...
  std::optional<Dataset> data;             // ... or a labeled dataset split at random
  double train_fraction = 0.2;
  std::vector<Method> methods{Method::kFans, Method::kPlr};
  std::size_t reps = 20;
  FansConfig fans;  // seed here seeds everything
  std::size_t workers = 1;
  metrics::SeKind se = metrics::SeKind::kRobust;
  bool timing = true;
};

struct RepResult {
  std::size_t misclassified = 0;
  std::size_t test_size = 0;
  double seconds = 0.0;

  double error() const { return test_size ? static_cast<double>(misclassified) / static_cast<double>(test_size) : 0.0; }
};

struct MethodResult {
  Method method;
  std::vector<RepResult> reps;

  std::vector<double> errors() const {
    std::vector<double> e;
    for (const auto& r : reps) e.push_back(r.error());
    return e;
  }
  std::vector<double> seconds() const {
    std::vector<double> s;
    for (const auto& r : reps) s.push_back(r.seconds);
    return s;
  }
};

struct BenchReport {
  std::vector<MethodResult> methods;
  metrics::SeKind se = metrics::SeKind::kRobust;
  bool timing = true;
  std::string description;
};

inline std::uint64_t rep_seed(std::uint64_t seed, std::string_view tag, std::size_t rep) {
  return rng::splitmix64(rng::splitmix64(seed ^ rng::tag_hash(tag)) ^ rep);
}

/// Stratified random train/test split of a labeled dataset.
inline DatasetPair random_split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error(ErrorCode::kConfig, "train fraction must lie in (0, 1)");
  const Labels& y = data.labels_or_throw();
  std::vector<std::size_t> train, test;
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) members.push_back(i);
    }
    if (members.empty()) throw Error(ErrorCode::kEmptyClass, "dataset lacks class " + std::to_string(label));
    rng::Stream s(seed, "bench-split", members.front());
    s.shuffle(members);
    const auto k = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {subset(data, train), subset(data, test)};
}

inline DatasetPair rep_data(const BenchConfig& cfg, std::size_t rep) {
  if (cfg.simulation) {
    sim::SimSpec spec = *cfg.simulation;
    spec.seed = rep_seed(cfg.fans.seed, "bench-data", rep);
    return sim::generate(spec);
  }
  if (cfg.data) return random_split(*cfg.data, cfg.train_fraction, rep_seed(cfg.fans.seed, "bench-data", rep));
  throw Error(ErrorCode::kUsage, "benchmark needs a simulated design or a dataset");
}

inline Labels fit_and_predict(Method method, const DatasetPair& d, const BenchConfig& cfg, std::size_t rep) {
  const std::uint64_t seed = rep_seed(cfg.fans.seed, to_string(method), rep);
  switch (method) {
    case Method::kFans:
    case Method::kFans2: {
      FansConfig fc = cfg.fans;
      fc.variant = method == Method::kFans ? Variant::kFans : Variant::kFans2;
      fc.seed = seed;
      fc.workers = 1;
      return predict(train(d.train, fc), d.test.features);
    }
    case Method::kPlr: {
      plr::CvOptions cv;
      cv.folds = cfg.fans.cv_folds;
      cv.loss = cfg.fans.cv_loss;
      const auto model = baselines::fit_plr_raw(d.train, cfg.fans.path_options(), cv, seed);
      return baselines::predict_plr(model, d.test.features);
    }
    case Method::kNb: {
      const auto model = baselines::fit_nb(d.train, cfg.fans.bandwidth, cfg.fans.floor);
      return baselines::predict_nb(model, d.test.features);
    }
  }
  return {};
}

/// Repetitions run concurrently (bounded by cfg.workers); every result is
/// stored by (method, rep) index.
inline BenchReport run_bench(const BenchConfig& cfg) {
  cfg.fans.validate();
  if (cfg.reps < 1) throw Error(ErrorCode::kConfig, "need at least one repetition");
  if (cfg.simulation.has_value() == cfg.data.has_value()) {
    throw Error(ErrorCode::kUsage, "benchmark needs exactly one of a simulated design or a dataset");
  }
  BenchReport report;
  report.se = cfg.se;
  report.timing = cfg.timing;
  for (Method m : cfg.methods) report.methods.push_back({m, std::vector<RepResult>(cfg.reps)});

  parallel_for(cfg.reps, resolve_workers(cfg.workers), [&](std::size_t rep) {
    const DatasetPair d = rep_data(cfg, rep);
    const Labels& truth = d.test.labels_or_throw();
    for (auto& mr : report.methods) {
      const auto start = std::chrono::steady_clock::now();
      const Labels pred = fit_and_predict(mr.method, d, cfg, rep);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      RepResult& r = mr.reps[rep];
      r.test_size = truth.size();
      for (std::size_t i = 0; i < truth.size(); ++i) r.misclassified += pred[i] != truth[i];
      r.seconds = elapsed.count();
    }
  });
  return report;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline std::string report_csv(const BenchReport& report) {
  std::string out = "method,median_error_pct,robust_se_pct,median_seconds,reps\n";
  for (const auto& mr : report.methods) {
    const auto errors = mr.errors();
    const auto s = metrics::compute_metrics(errors, report.se);
    const auto secs = mr.seconds();
    out += std::string(to_string(mr.method)) + "," + detail::fixed(100.0 * s.median, 2) + "," +
           detail::fixed(100.0 * s.se, 2) + "," +
           (report.timing ? detail::fixed(metrics::median(secs), 3) : std::string("NA")) + "," +
           std::to_string(errors.size()) + "\n";
  }
  return out;
}

inline std::string report_text(const BenchReport& report) {
  std::string out;
  if (!report.description.empty()) out += report.description + "\n";
  out += report.se == metrics::SeKind::kRobust ? "standard error: 1.4826 * MAD / sqrt(reps)\n"
                                               : "standard error: sample SD / sqrt(reps)\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %20s %16s %6s\n", "method", "median error % (SE)", "median seconds", "reps");
  out += line;
  for (const auto& mr : report.methods) {
    const auto errors = mr.errors();
    const auto s = metrics::compute_metrics(errors, report.se);
    const std::string cell = detail::fixed(100.0 * s.median, 1) + " (" + detail::fixed(100.0 * s.se, 1) + ")";
    const std::string secs = report.timing ? detail::fixed(metrics::median(mr.seconds()), 3) : "NA";
    std::snprintf(line, sizeof line, "%-8s %20s %16s %6zu\n", std::string(to_string(mr.method)).c_str(), cell.c_str(),
                  secs.c_str(), errors.size());
    out += line;
  }
  return out;
}

/// Per-repetition audit rows: error_pct = 100 * misclassified / test_size.
inline std::string errors_csv(const BenchReport& report) {
  std::string out = "method,rep,misclassified,test_size,error_pct\n";
  for (const auto& mr : report.methods) {
    for (std::size_t r = 0; r < mr.reps.size(); ++r) {
      const auto& rr = mr.reps[r];
      out += std::string(to_string(mr.method)) + "," + std::to_string(r) + "," + std::to_string(rr.misclassified) + "," +
             std::to_string(rr.test_size) + "," + detail::fixed(100.0 * rr.error(), 4) + "\n";
    }
  }
  return out;
}

inline std::string timings_csv(const BenchReport& report) {
  std::string out = "method,rep,seconds\n";
  for (const auto& mr : report.methods) {
    for (std::size_t r = 0; r < mr.reps.size(); ++r) {
      out += std::string(to_string(mr.method)) + "," + std::to_string(r) + "," + detail::fixed(mr.reps[r].seconds, 6) + "\n";
    }
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

/// report.csv, report.txt, errors.csv and (with timing) timings.csv.
inline void write_report(const BenchReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "report.csv", report_csv(report));
  write_file(dir / "report.txt", report_text(report));
  write_file(dir / "errors.csv", errors_csv(report));
  if (report.timing) write_file(dir / "timings.csv", timings_csv(report));
}

}  // namespace fans::bench
