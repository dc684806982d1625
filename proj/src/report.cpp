#include "scfr/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scfr/csv.hpp"
#include "scfr/errors.hpp"

namespace scfr {

namespace {

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

double threshold_for(const RunThresholds& thresholds, int run_id) {
  const auto it = thresholds.find(run_id);
  if (it == thresholds.end()) {
    throw InputError("no threshold known for run " + std::to_string(run_id));
  }
  return it->second;
}

std::vector<bool> pooled_labels(const MethodPredictions& m, const RunThresholds& thresholds) {
  std::vector<bool> out;
  for (const auto& run : m.runs) {
    const auto labels = positive_labels(run.y_pred, threshold_for(thresholds, run.run_id));
    out.insert(out.end(), labels.begin(), labels.end());
  }
  return out;
}

}  // namespace

void check_consistent(const std::vector<MethodPredictions>& methods) {
  if (methods.empty()) return;
  const auto& ref = methods.front();
  for (const auto& m : methods) {
    if (m.runs.size() != ref.runs.size()) {
      throw InputError("'" + m.method_name + "' covers " + std::to_string(m.runs.size()) +
                       " runs, '" + ref.method_name + "' covers " +
                       std::to_string(ref.runs.size()));
    }
    for (std::size_t r = 0; r < m.runs.size(); ++r) {
      const auto& a = ref.runs[r];
      const auto& b = m.runs[r];
      if (a.run_id != b.run_id) {
        throw InputError("'" + m.method_name + "' and '" + ref.method_name +
                         "' cover different run ids");
      }
      if (a.y_true.size() != b.y_true.size() ||
          !std::equal(a.y_true.begin(), a.y_true.end(), b.y_true.begin(), close)) {
        throw InputError("inconsistent y_true for run " + std::to_string(a.run_id) + " between '" +
                         ref.method_name + "' and '" + m.method_name + "'");
      }
    }
  }
}

std::string pn_table_csv(const std::vector<MethodPredictions>& methods,
                         const RunThresholds& thresholds) {
  std::ostringstream out;
  out << "method,p_count,n_count\n";
  for (const auto& m : methods) {
    ThresholdCounts total;
    for (const auto& run : m.runs) {
      const auto c = threshold_counts(run.y_pred, threshold_for(thresholds, run.run_id));
      total.p_count += c.p_count;
      total.n_count += c.n_count;
    }
    out << m.method_name << ',' << total.p_count << ',' << total.n_count << '\n';
  }
  return out.str();
}

std::string kappa_table_csv(const std::vector<MethodPredictions>& methods,
                            const RunThresholds& thresholds) {
  std::ostringstream out;
  out << "method_a,method_b,kappa,agreement\n";
  std::vector<std::vector<bool>> labels;
  for (const auto& m : methods) labels.push_back(pooled_labels(m, thresholds));
  for (std::size_t a = 0; a < methods.size(); ++a) {
    for (std::size_t b = a + 1; b < methods.size(); ++b) {
      const double k = cohen_kappa(labels[a], labels[b]);
      out << methods[a].method_name << ',' << methods[b].method_name << ',' << format_real(k)
          << ',' << kappa_label(k) << '\n';
    }
  }
  return out.str();
}

TopKCsv top_k_csv(const std::vector<MethodPredictions>& methods, std::size_t k,
                  std::optional<int> run_id) {
  std::ostringstream rows, summary;
  rows << "method,run_id,rank,row_id,y_true,y_pred\n";
  summary << "method,run_id,k,mean_true,mean_pred,mean_relative_error,rmse\n";
  for (const auto& m : methods) {
    if (m.runs.empty()) continue;
    const auto it = run_id ? std::find_if(m.runs.begin(), m.runs.end(),
                                          [&](const PredictionSet& s) { return s.run_id == *run_id; })
                           : m.runs.begin();
    if (it == m.runs.end()) {
      throw InputError("'" + m.method_name + "' has no run " + std::to_string(*run_id));
    }
    const TopKTable t = top_k_table(*it, std::min(k, it->y_pred.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      rows << m.method_name << ',' << it->run_id << ',' << i + 1 << ',' << t.rows[i].index << ','
           << format_real(t.rows[i].y_true) << ',' << format_real(t.rows[i].y_pred) << '\n';
    }
    summary << m.method_name << ',' << it->run_id << ',' << t.rows.size() << ','
            << format_real(t.mean_true) << ',' << format_real(t.mean_pred) << ','
            << (std::isnan(t.mean_relative_error) ? std::string()
                                                  : format_real(t.mean_relative_error))
            << ',' << format_real(t.rmse) << '\n';
  }
  return {rows.str(), summary.str()};
}

RunThresholds read_run_thresholds(const std::filesystem::path& runs_csv) {
  const CsvTable table = read_csv_table(runs_csv);
  const int c_run = table.column("run_id"), c_thr = table.column("threshold");
  if (c_run < 0 || c_thr < 0) {
    throw ParseError(runs_csv.string() + ": needs run_id and threshold columns");
  }
  RunThresholds out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    double run = 0, thr = 0;
    if (!parse_real(table.rows[r][c_run], run) || !parse_real(table.rows[r][c_thr], thr)) {
      throw ParseError(runs_csv.string() + ":" + std::to_string(table.line_numbers[r]) +
                       ": malformed run row");
    }
    out[static_cast<int>(run)] = thr;
  }
  return out;
}

std::vector<std::filesystem::path> run_report(const ReportConfig& config) {
  if (config.prediction_files.empty()) throw InputError("report needs at least one prediction file");
  std::vector<MethodPredictions> methods;
  for (const auto& path : config.prediction_files) {
    auto sets = read_prediction_file(path);
    methods.push_back({path.stem().string(), std::move(sets)});
  }
  check_consistent(methods);

  RunThresholds thresholds;
  if (config.runs_csv) thresholds = read_run_thresholds(*config.runs_csv);
  if (config.threshold) {
    for (const auto& run : methods.front().runs) thresholds[run.run_id] = *config.threshold;
  }
  if (thresholds.empty()) {
    throw InputError("report needs --threshold or a runs CSV with thresholds");
  }

  const TopKCsv top = top_k_csv(methods, config.top_k, config.run_id);
  const std::vector<std::pair<std::string, std::string>> files = {
      {"topk.csv", top.rows},
      {"topk_summary.csv", top.summary},
      {"pn_table.csv", pn_table_csv(methods, thresholds)},
      {"kappa.csv", kappa_table_csv(methods, thresholds)},
  };
  std::filesystem::create_directories(config.out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    write_file_atomic(config.out_dir / name, content);
    written.push_back(config.out_dir / name);
  }
  return written;
}

}  // namespace scfr
