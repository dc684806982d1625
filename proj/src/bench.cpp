#include "scfr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "scfr/csv.hpp"
#include "scfr/errors.hpp"

namespace scfr {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.begin(), v.end()}; }

double safe_mean_relative_error(std::span<const double> y_true, std::span<const double> y_pred) {
  if (std::find(y_true.begin(), y_true.end(), 0.0) != y_true.end()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return mean_relative_error(y_true, y_pred);
}

RunReport score(const PredictionSet& set, double threshold, double training_target_max,
                double seconds) {
  RunReport r;
  r.method_name = set.method_name;
  r.run_id = set.run_id;
  r.seed = set.seed;
  r.rmse = rmse(set.y_true, set.y_pred);
  r.mean_relative_error = safe_mean_relative_error(set.y_true, set.y_pred);
  const auto counts = threshold_counts(set.y_pred, threshold);
  r.p_count = counts.p_count;
  r.n_count = counts.n_count;
  r.beyond_training_max = count_beyond_training_max(set.y_pred, training_target_max);
  r.threshold = threshold;
  r.fit_seconds = seconds;
  return r;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string real_or_blank(double v) { return std::isnan(v) ? std::string() : format_real(v); }

}  // namespace

void ExperimentConfig::validate() const {
  fit.validate();
  if (runs < 1) throw InputError("runs must be >= 1");
  if (jobs < 1) throw InputError("jobs must be >= 1");
  if (!(quantile > 0.0 && quantile < 1.0)) throw InputError("quantile must lie in (0, 1)");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw InputError("subsample must lie in (0, 1]");
}

RunOutcome run_single(const ExperimentConfig& config, const Dataset& ds, int run_id) {
  RunOutcome out;
  out.run_id = run_id;
  out.seed = config.base_seed + static_cast<std::uint64_t>(run_id);

  const SplitPair split = config.protocol == Protocol::kOutOfSample
                              ? split_out_of_sample(ds, out.seed)
                              : split_out_of_domain(ds, out.seed, config.quantile, config.subsample);
  // Out-of-sample runs count positives against the full-data domain cut.
  out.threshold = config.protocol == Protocol::kOutOfDomain
                      ? split.threshold
                      : split_out_of_domain(ds, 0, config.quantile, 1.0).threshold;
  out.training_target_max = split.train.target.maxCoeff();

  Dataset train = split.train;
  Dataset test = split.test;
  MinMaxParams scaling;
  if (config.minmax) {
    scaling = minmax_fit(train);
    train = minmax_apply(scaling, train);
    test = minmax_apply(scaling, test);
  }
  const auto restore = [&](Eigen::VectorXd pred) {
    return config.minmax ? minmax_restore_target(scaling, pred) : pred;
  };

  const auto make_set = [&](const char* name, const Eigen::VectorXd& pred) {
    if (!pred.allFinite()) {
      throw NumericError(std::string(name) + " produced non-finite predictions");
    }
    PredictionSet set;
    set.method_name = name;
    set.run_id = run_id;
    set.seed = out.seed;
    set.y_true = to_std(split.test.target);
    set.y_pred = to_std(pred);
    return set;
  };

  auto t0 = Clock::now();
  FitResult cfr = fit_traced(train.features, train.target, config.fit, out.seed);
  const Eigen::VectorXd cfr_pred = restore(cfr.model.predict(test.features));
  const double cfr_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  out.cfr_depth = cfr.chosen_depth;

  t0 = Clock::now();
  const LinearModel linear = fit_linear(train.features, train.target);
  const Eigen::VectorXd lin_pred = restore(linear.evaluate(test.features));
  const double lin_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  out.predictions.push_back(make_set(kCfrMethod, cfr_pred));
  out.predictions.push_back(make_set(kLinearMethod, lin_pred));
  out.reports.push_back(
      score(out.predictions[0], out.threshold, out.training_target_max, cfr_seconds));
  out.reports.push_back(
      score(out.predictions[1], out.threshold, out.training_target_max, lin_seconds));
  return out;
}

BenchResult run_benchmark(const ExperimentConfig& config, const Dataset& ds) {
  config.validate();
  BenchResult result;
  result.runs.resize(static_cast<std::size_t>(config.runs));
  std::vector<std::exception_ptr> failures(result.runs.size());

  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < config.runs; r = next++) {
      try {
        result.runs[r] = run_single(config, ds, r);
      } catch (...) {
        failures[r] = std::current_exception();
      }
    }
  };
  const int threads = std::min(config.jobs, config.runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t r = 0; r < failures.size(); ++r) {
    if (!failures[r]) continue;
    const std::string where = "run " + std::to_string(r) + " (seed " +
                              std::to_string(config.base_seed + r) + "): ";
    try {
      std::rethrow_exception(failures[r]);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    } catch (const std::exception& e) {
      throw Error(where + e.what());
    }
  }

  for (const char* name : {kCfrMethod, kLinearMethod}) {
    MethodPredictions mp{name, {}};
    for (const auto& run : result.runs) {
      for (const auto& set : run.predictions) {
        if (set.method_name == name) mp.runs.push_back(set);
      }
      for (const auto& rep : run.reports) {
        if (rep.method_name == name) result.reports.push_back(rep);
      }
    }
    result.methods.push_back(std::move(mp));
  }
  for (const auto& run : result.runs) result.thresholds[run.run_id] = run.threshold;

  for (const auto& path : config.prediction_files) {
    auto sets = read_prediction_file(path);
    const std::string name = sets.empty() ? path.stem().string() : sets.front().method_name;
    MethodPredictions mp{name, {}};
    for (const auto& run : result.runs) {
      const auto it = std::find_if(sets.begin(), sets.end(),
                                   [&](const PredictionSet& s) { return s.run_id == run.run_id; });
      if (it == sets.end()) {
        throw InputError(path.string() + ": no predictions for run " + std::to_string(run.run_id));
      }
      const auto& truth = run.predictions.front().y_true;
      if (it->y_true.size() != truth.size() ||
          !std::equal(truth.begin(), truth.end(), it->y_true.begin(), close)) {
        throw InputError(path.string() + ": run " + std::to_string(run.run_id) +
                         " does not match this split's test targets");
      }
      it->seed = run.seed;
      result.reports.push_back(score(*it, run.threshold, run.training_target_max,
                                     std::numeric_limits<double>::quiet_NaN()));
      mp.runs.push_back(*it);
    }
    result.methods.push_back(std::move(mp));
  }

  result.aggregates = aggregate(result.reports);
  result.ranks = rank_matrix(result.reports);
  return result;
}

std::vector<std::pair<std::string, std::string>> bench_outputs(const BenchResult& result) {
  std::vector<std::pair<std::string, std::string>> files;

  std::ostringstream runs;
  runs << "method,run_id,seed,rmse,mean_relative_error,p_count,n_count,threshold,"
          "beyond_training_max,depth\n";
  for (const auto& r : result.reports) {
    runs << r.method_name << ',' << r.run_id << ',' << r.seed << ',' << format_real(r.rmse) << ','
         << real_or_blank(r.mean_relative_error) << ',' << r.p_count << ',' << r.n_count << ','
         << format_real(r.threshold) << ',' << r.beyond_training_max << ',';
    if (r.method_name == kCfrMethod) {
      runs << result.runs[static_cast<std::size_t>(r.run_id)].cfr_depth;
    } else if (r.method_name == kLinearMethod) {
      runs << 0;
    }
    runs << '\n';
  }
  files.emplace_back("runs.csv", runs.str());

  std::ostringstream agg;
  agg << "method,runs,median_rmse,std_rmse,median_mean_relative_error,p_count,n_count,"
         "beyond_training_max\n";
  for (const auto& a : result.aggregates) {
    std::vector<double> mre;
    int p = 0, n = 0, beyond = 0;
    for (const auto& r : result.reports) {
      if (r.method_name != a.method_name) continue;
      mre.push_back(r.mean_relative_error);
      p += r.p_count;
      n += r.n_count;
      beyond += r.beyond_training_max;
    }
    const bool mre_defined = std::none_of(mre.begin(), mre.end(), [](double v) { return std::isnan(v); });
    agg << a.method_name << ',' << a.runs << ',' << format_real(a.median_rmse) << ','
        << format_real(a.std_rmse) << ','
        << (mre_defined ? format_real(median(mre)) : std::string()) << ',' << p << ',' << n << ','
        << beyond << '\n';
  }
  files.emplace_back("aggregate.csv", agg.str());

  std::ostringstream ranks;
  ranks << "run_id";
  for (const auto& m : result.ranks.methods) ranks << ',' << m;
  ranks << '\n';
  for (std::size_t r = 0; r < result.ranks.ranks.size(); ++r) {
    ranks << result.ranks.run_ids[r];
    for (double v : result.ranks.ranks[r]) ranks << ',' << format_real(v);
    ranks << '\n';
  }
  files.emplace_back("ranks.csv", ranks.str());

  files.emplace_back("pn_table.csv", pn_table_csv(result.methods, result.thresholds));
  files.emplace_back("kappa.csv", kappa_table_csv(result.methods, result.thresholds));
  for (const auto& m : result.methods) {
    files.emplace_back("predictions/" + m.method_name + ".csv", prediction_csv(m.runs));
  }
  return files;
}

std::vector<std::filesystem::path> write_bench_outputs(const BenchResult& result,
                                                       const std::filesystem::path& out_dir) {
  auto files = bench_outputs(result);
  std::ostringstream timings;
  timings << "method,run_id,fit_seconds\n";
  for (const auto& r : result.reports) {
    timings << r.method_name << ',' << r.run_id << ',' << real_or_blank(r.fit_seconds) << '\n';
  }
  files.emplace_back("timings.csv", timings.str());

  std::filesystem::create_directories(out_dir / "predictions");
  std::vector<std::filesystem::path> staged;
  try {
    for (const auto& [name, content] : files) {
      auto tmp = out_dir / name;
      tmp += ".tmp";
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      staged.push_back(tmp);
      out << content;
      out.close();
      if (!out) throw DataError("failed writing " + tmp.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : staged) std::filesystem::remove(p, ec);
    throw;
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    auto tmp = out_dir / name;
    tmp += ".tmp";
    std::filesystem::rename(tmp, out_dir / name);
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace scfr
