// scfr: fit, predict, benchmark and report for spline continued fraction
// regression.
//
// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage or input error.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scfr/bench.hpp"
#include "scfr/cfr.hpp"
#include "scfr/csv.hpp"
#include "scfr/data_io.hpp"
#include "scfr/errors.hpp"
#include "scfr/report.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw scfr::InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Flat "key = value" file; '#' starts a comment. Keys name long options
// without the leading dashes. Options given on the command line win.
void apply_config_file(CLI::App& app, const std::filesystem::path& path) {
  std::istringstream lines(read_text(path));
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    const auto eq = line.find('=');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) throw scfr::InputError(where + ": expected key = value");
    std::string key = CLI::detail::trim_copy(line.substr(0, eq));
    std::string value = CLI::detail::trim_copy(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw scfr::InputError(where + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    std::istringstream values(value);
    for (std::string v; values >> v;) opt->add_result(v);
    opt->run_callback();
  }
}

void add_fit_options(CLI::App& cmd, scfr::FitConfig& fit) {
  cmd.add_option("--lambda", fit.lambda, "Smoothing weight")->capture_default_str();
  cmd.add_option("--knots", fit.knots_per_depth, "New knots per depth")->capture_default_str();
  cmd.add_option("--norm", fit.norm, "Target normalization constant")->capture_default_str();
  cmd.add_option("--max-depth", fit.max_depth, "Deepest layer")->capture_default_str();
  cmd.add_flag("--auto-depth", fit.auto_depth, "Truncate at the first training-RMSE increase");
  cmd.add_option("--offset-epsilon", fit.offset_epsilon, "Residual shift margin")
      ->capture_default_str();
  cmd.add_option("--offset-scale", fit.offset_scale, "Residual shift as a multiple of its range")
      ->capture_default_str();
  cmd.add_option("--denom-floor", fit.denom_floor, "Smallest denominator magnitude")
      ->capture_default_str();
  cmd.add_flag("--literal-final-offset", fit.literal_final_offset,
               "Also subtract the deepest layer's offset");
}

void write_fit_log(const std::filesystem::path& path, const scfr::FitResult& result,
                   double total_seconds) {
  std::ostringstream log;
  log << "depth,train_rmse,knot_count,offset,seconds,selected\n";
  for (const auto& t : result.trace) {
    log << t.depth << ',' << scfr::format_real(t.train_rmse) << ',' << t.knot_count << ','
        << scfr::format_real(t.offset) << ',' << scfr::format_real(t.seconds) << ','
        << (t.depth == result.chosen_depth ? 1 : 0) << '\n';
  }
  log << "# total_seconds," << scfr::format_real(total_seconds) << '\n';
  scfr::write_file_atomic(path, log.str());
}

struct FitArgs {
  std::string data, target = scfr::kDefaultTarget, out = "model.json", log, config;
  std::uint64_t seed = 0;
  scfr::FitConfig fit;
};

int cmd_fit(const FitArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const scfr::Dataset ds = scfr::load_csv(a.data, a.target);
  scfr::FitResult result = scfr::fit_traced(ds.features, ds.target, a.fit, a.seed);
  result.model.feature_names = ds.feature_names;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  scfr::write_file_atomic(a.out, scfr::serialize(result.model));
  write_fit_log(a.log.empty() ? a.out + ".log.csv" : a.log, result, seconds);
  for (const auto& t : result.trace) {
    std::cerr << "depth " << t.depth << ": train_rmse=" << t.train_rmse
              << " knots=" << t.knot_count << " offset=" << t.offset << '\n';
  }
  std::cerr << "selected depth " << result.chosen_depth << ", " << seconds << " s\n";
  return 0;
}

struct PredictArgs {
  std::string model, data, out = "predictions.csv", target = scfr::kDefaultTarget;
};

int cmd_predict(const PredictArgs& a) {
  const scfr::CFracModel model = scfr::deserialize(read_text(a.model));
  const scfr::CsvTable table = scfr::read_csv_table(a.data);
  const int target_col = table.column(a.target);

  std::vector<int> cols;
  if (model.feature_names.empty()) {
    for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
      if (c != target_col) cols.push_back(c);
    }
    if (static_cast<int>(cols.size()) != model.feature_count()) {
      throw scfr::StructuralError("model expects " + std::to_string(model.feature_count()) +
                                  " feature columns, file has " + std::to_string(cols.size()));
    }
  } else {
    std::vector<std::string> missing;
    for (const auto& name : model.feature_names) {
      const int c = table.column(name);
      if (c < 0) missing.push_back(name);
      cols.push_back(c);
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw scfr::StructuralError(a.data + ": missing feature columns: " + list);
    }
    for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
      if (c == target_col) continue;
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) {
        std::cerr << "warning: ignoring unknown column '" << table.header[c] << "'\n";
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()));
  Eigen::VectorXd y(n);
  const auto cell = [&](Eigen::Index r, int c) {
    double v = 0.0;
    if (!scfr::parse_real(table.rows[r][c], v)) {
      throw scfr::DataError(a.data + ": line " + std::to_string(table.line_numbers[r]) +
                            ", column '" + table.header[c] + "': not a finite number");
    }
    return v;
  };
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) X(r, static_cast<Eigen::Index>(j)) = cell(r, cols[j]);
    if (target_col >= 0) y[r] = cell(r, target_col);
  }
  const Eigen::VectorXd pred = model.predict(X);
  if (!pred.allFinite()) throw scfr::NumericError("non-finite prediction");

  std::ostringstream out;
  out << "row_id,y_pred" << (target_col >= 0 ? ",y_true" : "") << '\n';
  for (Eigen::Index r = 0; r < n; ++r) {
    out << r << ',' << scfr::format_real(pred[r]);
    if (target_col >= 0) out << ',' << scfr::format_real(y[r]);
    out << '\n';
  }
  scfr::write_file_atomic(a.out, out.str());
  return 0;
}

struct BenchArgs {
  scfr::ExperimentConfig exp;
  std::string protocol = "oos", data, out_dir = "bench_out", config;
  std::vector<std::string> predictions;
};

int cmd_bench(BenchArgs& a) {
  a.exp.data = a.data;
  a.exp.out_dir = a.out_dir;
  a.exp.protocol = a.protocol == "ood" ? scfr::Protocol::kOutOfDomain : scfr::Protocol::kOutOfSample;
  a.exp.prediction_files.assign(a.predictions.begin(), a.predictions.end());
  a.exp.validate();
  const scfr::Dataset ds = scfr::load_csv(a.exp.data, a.exp.target);
  const scfr::BenchResult result = scfr::run_benchmark(a.exp, ds);
  scfr::write_bench_outputs(result, a.exp.out_dir);
  for (const auto& agg : result.aggregates) {
    std::cerr << agg.method_name << ": median RMSE " << agg.median_rmse << " +- " << agg.std_rmse
              << " over " << agg.runs << " runs\n";
  }
  return 0;
}

struct SynthArgs {
  std::string kind, out = "synth.csv";
  std::optional<double> lo, hi, noise;
  int n = 200;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
  scfr::SynthParams p;
  p.n = a.n;
  p.seed = a.seed;
  const bool gamma = a.kind == "gamma";
  p.x_lo = a.lo.value_or(gamma ? 0.5 : -10.0);
  p.x_hi = a.hi.value_or(gamma ? 6.0 : 10.0);
  p.noise_sd = a.noise.value_or(gamma ? 1.0 : 0.05);
  const scfr::Dataset ds = gamma ? scfr::gen_gamma(p) : scfr::gen_sinc(p);
  scfr::write_file_atomic(a.out, scfr::to_csv(ds));
  return 0;
}

struct ReportArgs {
  std::string runs, out_dir = "report_out";
  std::vector<std::string> predictions;
  std::optional<double> threshold;
  std::size_t top_k = 20;
  std::optional<int> run;
};

int cmd_report(const ReportArgs& a) {
  scfr::ReportConfig cfg;
  if (!a.runs.empty()) cfg.runs_csv = a.runs;
  cfg.prediction_files.assign(a.predictions.begin(), a.predictions.end());
  cfg.threshold = a.threshold;
  cfg.top_k = a.top_k;
  cfg.run_id = a.run;
  cfg.out_dir = a.out_dir;
  scfr::run_report(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spline continued fraction regression"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit a model and write the model document");
  fit->add_option("--data", fit_args.data, "Training CSV")->required();
  fit->add_option("--target", fit_args.target, "Target column")->capture_default_str();
  fit->add_option("--out", fit_args.out, "Model document path")->capture_default_str();
  fit->add_option("--log", fit_args.log, "Fit log CSV (default <out>.log.csv)");
  fit->add_option("--seed", fit_args.seed, "Recorded seed")->capture_default_str();
  fit->add_option("--config", fit_args.config, "Flat key = value option file");
  add_fit_options(*fit, fit_args.fit);

  PredictArgs pred_args;
  auto* predict = app.add_subcommand("predict", "Predict with a saved model");
  predict->add_option("--model", pred_args.model, "Model document")->required();
  predict->add_option("--data", pred_args.data, "Input CSV")->required();
  predict->add_option("--out", pred_args.out, "Predictions CSV")->capture_default_str();
  predict->add_option("--target", pred_args.target, "Target column, copied as y_true if present")
      ->capture_default_str();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Repeated train/test benchmark");
  bench->add_option("--data", bench_args.data, "Dataset CSV")->required();
  bench->add_option("--target", bench_args.exp.target, "Target column")->capture_default_str();
  bench->add_option("--protocol", bench_args.protocol, "oos or ood")
      ->check(CLI::IsMember({"oos", "ood"}))
      ->capture_default_str();
  bench->add_option("--runs", bench_args.exp.runs, "Number of runs")->capture_default_str();
  bench->add_option("--seed", bench_args.exp.base_seed, "Base seed; run r uses seed + r")
      ->capture_default_str();
  bench->add_option("--quantile", bench_args.exp.quantile, "Out-of-domain train quantile")
      ->capture_default_str();
  bench->add_option("--subsample", bench_args.exp.subsample, "Out-of-domain pool fraction")
      ->capture_default_str();
  bench->add_flag("--minmax", bench_args.exp.minmax, "Min-max scale on the train split");
  bench->add_option("--predictions", bench_args.predictions, "External prediction CSVs");
  bench->add_option("--out-dir", bench_args.out_dir, "Output directory")->capture_default_str();
  bench->add_option("--jobs", bench_args.exp.jobs, "Worker threads")->capture_default_str();
  bench->add_option("--config", bench_args.config, "Flat key = value option file");
  add_fit_options(*bench, bench_args.exp.fit);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("kind", synth_args.kind, "gamma or sinc")
      ->required()
      ->check(CLI::IsMember({"gamma", "sinc"}));
  synth->add_option("--n", synth_args.n, "Samples")->capture_default_str();
  synth->add_option("--lo", synth_args.lo, "Range start (gamma 0.5, sinc -10)");
  synth->add_option("--hi", synth_args.hi, "Range end (gamma 6, sinc 10)");
  synth->add_option("--noise", synth_args.noise, "Noise standard deviation (gamma 1, sinc 0.05)");
  synth->add_option("--seed", synth_args.seed, "Noise seed")->capture_default_str();
  synth->add_option("--out", synth_args.out, "Output CSV")->capture_default_str();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Top-k, P/N and kappa tables from prediction files");
  report->add_option("--predictions", report_args.predictions, "Prediction CSVs")->required();
  report->add_option("--runs", report_args.runs, "Bench runs.csv supplying per-run thresholds");
  report->add_option("--threshold", report_args.threshold, "Threshold for every run");
  report->add_option("--top-k", report_args.top_k, "Rows in the top-k table")->capture_default_str();
  report->add_option("--run", report_args.run, "Run used for the top-k table");
  report->add_option("--out-dir", report_args.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fit) {
      if (!fit_args.config.empty()) apply_config_file(*fit, fit_args.config);
      return cmd_fit(fit_args);
    }
    if (*predict) return cmd_predict(pred_args);
    if (*bench) {
      if (!bench_args.config.empty()) apply_config_file(*bench, bench_args.config);
      return cmd_bench(bench_args);
    }
    if (*synth) return cmd_synth(synth_args);
    if (*report) return cmd_report(report_args);
  } catch (const scfr::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
