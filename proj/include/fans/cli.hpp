#pragma once

// Command-line front end: simulate, train, predict, bench.
//
// Failures print one line to the error stream,
//   error code=<name> status=<exit>: <message>
// and return the status (2 usage, 3 data, 4 numeric, 5 I/O).

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fans/bench.hpp"
#include "fans/csv.hpp"
#include "fans/error.hpp"
#include "fans/fans.hpp"
#include "fans/model_io.hpp"
#include "fans/simgen.hpp"

namespace fans::cli {

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

namespace detail {

struct FansFlags {
  std::string variant = "fans";
  std::size_t splits = 20;
  bool unbalanced = false;
  std::uint64_t seed = 1;
  std::string bandwidth = "theory";
  double floor = kde::kDefaultFloor;
  bool grid_cache = false;
  std::size_t lambda_count = 100;
  double lambda_ratio = 1e-3;
  std::size_t folds = 5;
  std::string cv_loss = "misclassification";
  std::size_t workers = 0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--variant", variant, "fans or fans2")->check(CLI::IsMember({"fans", "fans2"}));
    cmd.add_option("--splits", splits, "number of random splits L");
    cmd.add_flag("--unbalanced", unbalanced, "draw every split independently (allows odd L)");
    cmd.add_option("--seed", seed, "random seed");
    cmd.add_option("--bandwidth", bandwidth, "theory | silverman | fixed:<h>");
    cmd.add_option("--floor", floor, "density truncation floor (cap is 1/floor)");
    cmd.add_flag("--grid-cache", grid_cache, "interpolate densities on a 2048-point grid");
    cmd.add_option("--lambda-count", lambda_count, "penalty levels on the path");
    cmd.add_option("--lambda-ratio", lambda_ratio, "smallest/largest penalty");
    cmd.add_option("--folds", folds, "cross-validation folds");
    cmd.add_option("--cv-loss", cv_loss, "misclassification or deviance")
        ->check(CLI::IsMember({"misclassification", "deviance"}));
    cmd.add_option("--workers", workers, "worker threads (default: FANS_WORKERS or 1)");
  }

  FansConfig config() const {
    FansConfig c;
    c.variant = parse_variant(variant);
    c.splits = splits;
    c.balanced_pairing = !unbalanced;
    c.seed = seed;
    c.bandwidth = kde::BandwidthRule::parse(bandwidth);
    c.floor = floor;
    c.grid_cache = grid_cache;
    c.lambda_count = lambda_count;
    c.lambda_ratio = lambda_ratio;
    c.cv_folds = folds;
    c.cv_loss = cv_loss == "deviance" ? plr::CvLoss::kDeviance : plr::CvLoss::kMisclassification;
    c.workers = resolve_workers(workers);
    c.validate();
    return c;
  }
};

inline std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

inline int fail(Streams io, ErrorCode code, const std::string& message) {
  const int status = exit_status(code);
  io.err << "error code=" << to_string(code) << " status=" << status << ": " << one_line(message) << '\n';
  return status;
}

}  // namespace detail

/// Runs the CLI on argv-style arguments (args[0] is the program name).
inline int run(const std::vector<std::string>& args, Streams io = {}) {
  CLI::App app{"FANS: density-ratio feature augmentation with L1 logistic regression"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "write train.csv and test.csv for a synthetic design");
  std::string example;
  std::size_t p = 100, n = 100, n_test = 0;
  double rho = 0.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  simulate->add_option("--example", example, "ex1..ex5 | intro")->required();
  simulate->add_option("--p", p, "dimension");
  simulate->add_option("--n", n, "training rows per class");
  simulate->add_option("--n-test", n_test, "test rows per class (default: --n)");
  simulate->add_option("--rho", rho, "correlation");
  simulate->add_option("--seed", sim_seed, "random seed");
  simulate->add_option("--out", sim_out, "output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "fit a model on a labeled CSV");
  detail::FansFlags train_flags;
  std::string train_data, train_label = "label", model_out;
  train_cmd->add_option("--data", train_data, "training CSV")->required();
  train_cmd->add_option("--label-col", train_label, "label column name");
  train_cmd->add_option("--model-out", model_out, "model JSON to write")->required();
  train_flags.attach(*train_cmd);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "score a CSV with a saved model");
  std::string predict_data, model_in, predict_out;
  std::optional<std::string> predict_label;
  bool vote = false;
  std::size_t predict_workers = 0;
  predict_cmd->add_option("--data", predict_data, "CSV to score")->required();
  predict_cmd->add_option("--label-col", predict_label, "label column (reports the error rate when present)");
  predict_cmd->add_option("--model-in", model_in, "model JSON")->required();
  predict_cmd->add_option("--out", predict_out, "output directory for predictions.csv")->required();
  predict_cmd->add_flag("--vote", vote, "majority vote across splits instead of probability averaging");
  predict_cmd->add_option("--workers", predict_workers, "worker threads");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "repeated train/test comparison across methods");
  detail::FansFlags bench_flags;
  std::optional<std::string> bench_example, bench_data;
  std::string bench_label = "label", methods = "fans,fans2,plr,nb", bench_out, timing = "on", se = "robust";
  std::size_t bench_p = 100, bench_n = 100, bench_n_test = 0, reps = 20;
  double bench_rho = 0.0, train_frac = 0.2;
  auto* ex_opt = bench_cmd->add_option("--example", bench_example, "ex1..ex5 | intro");
  auto* data_opt = bench_cmd->add_option("--data", bench_data, "labeled CSV split at random each repetition");
  ex_opt->excludes(data_opt);
  bench_cmd->add_option("--label-col", bench_label, "label column name");
  bench_cmd->add_option("--train-frac", train_frac, "training fraction for --data");
  bench_cmd->add_option("--p", bench_p, "dimension");
  bench_cmd->add_option("--n", bench_n, "training rows per class");
  bench_cmd->add_option("--n-test", bench_n_test, "test rows per class (default: --n)");
  bench_cmd->add_option("--rho", bench_rho, "correlation");
  bench_cmd->add_option("--reps", reps, "repetitions");
  bench_cmd->add_option("--methods", methods, "comma list of fans,fans2,plr,nb");
  bench_cmd->add_option("--out", bench_out, "output directory")->required();
  bench_cmd->add_option("--timing", timing, "on | off (off writes NA for median_seconds)")
      ->check(CLI::IsMember({"on", "off"}));
  bench_cmd->add_option("--se", se, "robust | sd")->check(CLI::IsMember({"robust", "sd"}));
  bench_flags.attach(*bench_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    io.out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return detail::fail(io, ErrorCode::kUsage, e.what());
  }

  try {
    if (*simulate) {
      sim::SimSpec spec;
      spec.example = sim::parse_example(example);
      spec.p = p;
      spec.n_per_class = n;
      spec.n_test_per_class = n_test ? n_test : n;
      spec.rho = rho;
      spec.seed = sim_seed;
      const auto pair = sim::generate(spec);
      std::error_code ec;
      std::filesystem::create_directories(sim_out, ec);
      if (ec) throw Error(ErrorCode::kIo, "cannot create '" + sim_out + "': " + ec.message());
      csv::save_csv((std::filesystem::path(sim_out) / "train.csv").string(), pair.train);
      csv::save_csv((std::filesystem::path(sim_out) / "test.csv").string(), pair.test);
      io.out << "wrote " << pair.train.rows() << " training and " << pair.test.rows() << " test rows to " << sim_out
             << '\n';
      return 0;
    }

    if (*train_cmd) {
      const FansConfig config = train_flags.config();
      const Dataset data = csv::load_csv(train_data, train_label);
      const FansModel model = train(data, config);
      io::save_model(model, model_out);
      io.out << "trained " << model.submodels.size() << " sub-models on " << data.rows() << " rows; wrote " << model_out
             << '\n';
      return 0;
    }

    if (*predict_cmd) {
      const FansModel model = io::load_model(model_in);
      const Dataset data = csv::load_csv(predict_data, predict_label);
      const std::size_t workers = resolve_workers(predict_workers);
      const Vector prob = predict_proba(model, data.features, workers);
      const Labels labels = vote ? majority_vote_predict(model, data.features, workers) : threshold(prob);
      std::error_code ec;
      std::filesystem::create_directories(predict_out, ec);
      if (ec) throw Error(ErrorCode::kIo, "cannot create '" + predict_out + "': " + ec.message());
      std::string text = "row_index,prob,label\n";
      for (std::size_t i = 0; i < labels.size(); ++i) {
        text += std::to_string(i) + "," + csv::format_double(prob[static_cast<Eigen::Index>(i)]) + "," +
                std::to_string(labels[i]) + "\n";
      }
      bench::write_file(std::filesystem::path(predict_out) / "predictions.csv", text);
      io.out << "wrote " << labels.size() << " predictions";
      if (data.labels) io.out << "; test error " << 100.0 * error_rate(labels, *data.labels) << "%";
      io.out << '\n';
      return 0;
    }

    if (*bench_cmd) {
      bench::BenchConfig cfg;
      cfg.fans = bench_flags.config();
      cfg.workers = cfg.fans.workers;
      cfg.methods = bench::parse_methods(methods);
      cfg.reps = reps;
      cfg.timing = timing == "on";
      cfg.se = se == "sd" ? metrics::SeKind::kPlainSd : metrics::SeKind::kRobust;
      std::string description;
      if (bench_example) {
        sim::SimSpec spec;
        spec.example = sim::parse_example(*bench_example);
        spec.p = bench_p;
        spec.n_per_class = bench_n;
        spec.n_test_per_class = bench_n_test ? bench_n_test : bench_n;
        spec.rho = bench_rho;
        spec.validate();
        cfg.simulation = spec;
        std::ostringstream d;
        d << "design " << *bench_example << ", p=" << bench_p << ", n=" << bench_n << "/class, rho=" << bench_rho
          << ", reps=" << reps << ", L=" << cfg.fans.splits << ", seed=" << cfg.fans.seed;
        description = d.str();
      } else if (bench_data) {
        cfg.data = csv::load_csv(*bench_data, bench_label);
        cfg.train_fraction = train_frac;
        std::ostringstream d;
        d << "data " << *bench_data << ", train fraction " << train_frac << ", reps=" << reps << ", L=" << cfg.fans.splits
          << ", seed=" << cfg.fans.seed;
        description = d.str();
      } else {
        throw Error(ErrorCode::kUsage, "bench needs --example or --data");
      }
      auto report = bench::run_bench(cfg);
      report.description = description;
      bench::write_report(report, bench_out);
      io.out << bench::report_text(report);
      return 0;
    }
  } catch (const Error& e) {
    return detail::fail(io, e.code(), e.what());
  } catch (const std::exception& e) {
    return detail::fail(io, ErrorCode::kIo, e.what());
  }
  return detail::fail(io, ErrorCode::kUsage, "no command given");
}

inline int run(int argc, char** argv, Streams io = {}) {
  return run(std::vector<std::string>(argv, argv + argc), io);
}

}  // namespace fans::cli
