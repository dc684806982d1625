#include "scfr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "scfr/csv.hpp"
#include "scfr/errors.hpp"

namespace scfr {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw StructuralError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw InputError(std::string(what) + ": empty input");
}

}  // namespace

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, "rmse");
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(y_true.size()));
}

double mean_relative_error(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, "mean relative error");
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 0.0) {
      throw InputError("mean relative error: true value at index " + std::to_string(i) +
                       " is zero");
    }
    sum += std::abs(y_pred[i] - y_true[i]) / std::abs(y_true[i]);
  }
  return sum / static_cast<double>(y_true.size());
}

ThresholdCounts threshold_counts(std::span<const double> y_pred, double threshold) {
  ThresholdCounts c;
  for (double v : y_pred) (v >= threshold ? c.p_count : c.n_count)++;
  return c;
}

int count_beyond_training_max(std::span<const double> y_pred, double training_target_max) {
  return static_cast<int>(
      std::count_if(y_pred.begin(), y_pred.end(), [&](double v) { return v > training_target_max; }));
}

double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw StructuralError("cohen kappa: label vectors differ in length");
  if (a.empty()) throw InputError("cohen kappa: empty input");
  const auto n = static_cast<double>(a.size());
  double agree = 0.0, pos_a = 0.0, pos_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i] ? 1.0 : 0.0;
    pos_a += a[i] ? 1.0 : 0.0;
    pos_b += b[i] ? 1.0 : 0.0;
  }
  const double p_o = agree / n;
  const double p_e = (pos_a / n) * (pos_b / n) + (1.0 - pos_a / n) * (1.0 - pos_b / n);
  if (p_e == 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::string kappa_label(double kappa) {
  if (kappa < 0.0) return "none";
  if (kappa <= 0.20) return "none to slight";
  if (kappa <= 0.40) return "fair";
  if (kappa <= 0.60) return "moderate";
  if (kappa <= 0.80) return "substantial";
  return "almost perfect";
}

std::vector<bool> positive_labels(std::span<const double> y_pred, double threshold) {
  std::vector<bool> out(y_pred.size());
  for (std::size_t i = 0; i < y_pred.size(); ++i) out[i] = y_pred[i] >= threshold;
  return out;
}

TopKTable top_k_table(const PredictionSet& set, std::size_t k) {
  check_pair(set.y_true, set.y_pred, "top-k table");
  if (k == 0 || k > set.y_pred.size()) {
    throw InputError("top-k table: k=" + std::to_string(k) + " but only " +
                     std::to_string(set.y_pred.size()) + " predictions");
  }
  std::vector<std::size_t> order(set.y_pred.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return set.y_pred[a] > set.y_pred[b]; });
  order.resize(k);

  TopKTable table;
  std::vector<double> yt, yp;
  for (std::size_t i : order) {
    table.rows.push_back({i, set.y_true[i], set.y_pred[i]});
    yt.push_back(set.y_true[i]);
    yp.push_back(set.y_pred[i]);
  }
  table.mean_true = std::accumulate(yt.begin(), yt.end(), 0.0) / static_cast<double>(k);
  table.mean_pred = std::accumulate(yp.begin(), yp.end(), 0.0) / static_cast<double>(k);
  table.rmse = rmse(yt, yp);
  const bool has_zero = std::find(yt.begin(), yt.end(), 0.0) != yt.end();
  table.mean_relative_error =
      has_zero ? std::numeric_limits<double>::quiet_NaN() : mean_relative_error(yt, yp);
  return table;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of empty sequence");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double population_std(std::span<const double> values) {
  if (values.empty()) throw InputError("standard deviation of empty sequence");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

namespace {

// Method names in order of first appearance, with their reports.
std::vector<std::pair<std::string, std::vector<const RunReport*>>> group_by_method(
    std::span<const RunReport> reports) {
  std::vector<std::pair<std::string, std::vector<const RunReport*>>> groups;
  for (const auto& r : reports) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == r.method_name; });
    if (it == groups.end()) {
      groups.push_back({r.method_name, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(&r);
  }
  for (const auto& g : groups) {
    if (g.second.size() != groups.front().second.size()) {
      throw InputError("method '" + g.first + "' has " + std::to_string(g.second.size()) +
                       " runs, '" + groups.front().first + "' has " +
                       std::to_string(groups.front().second.size()));
    }
  }
  return groups;
}

}  // namespace

std::vector<MethodAggregate> aggregate(std::span<const RunReport> reports) {
  std::vector<MethodAggregate> out;
  for (const auto& [name, runs] : group_by_method(reports)) {
    std::vector<double> values;
    for (const auto* r : runs) values.push_back(r->rmse);
    out.push_back({name, static_cast<int>(values.size()), median(values), population_std(values)});
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

RankMatrix rank_matrix(std::span<const RunReport> reports) {
  const auto groups = group_by_method(reports);
  RankMatrix out;
  if (groups.empty()) return out;
  for (const auto& g : groups) out.methods.push_back(g.first);
  const std::size_t runs = groups.front().second.size();
  for (std::size_t r = 0; r < runs; ++r) {
    const int run_id = groups.front().second[r]->run_id;
    std::vector<double> row;
    for (const auto& g : groups) {
      const auto it = std::find_if(g.second.begin(), g.second.end(),
                                   [&](const RunReport* rep) { return rep->run_id == run_id; });
      if (it == g.second.end()) {
        throw InputError("method '" + g.first + "' has no run " + std::to_string(run_id));
      }
      row.push_back((*it)->rmse);
    }
    out.run_ids.push_back(run_id);
    out.ranks.push_back(average_ranks(row));
  }
  return out;
}

std::string prediction_csv(std::span<const PredictionSet> sets) {
  std::ostringstream out;
  out << "run_id,row_id,y_true,y_pred\n";
  for (const auto& s : sets) {
    for (std::size_t i = 0; i < s.y_pred.size(); ++i) {
      out << s.run_id << ',' << i << ',' << format_real(s.y_true[i]) << ','
          << format_real(s.y_pred[i]) << '\n';
    }
  }
  return out.str();
}

std::vector<PredictionSet> read_prediction_file(const std::filesystem::path& path,
                                                const std::string& method_name) {
  const CsvTable table = read_csv_table(path);
  const int c_run = table.column("run_id"), c_row = table.column("row_id");
  const int c_true = table.column("y_true"), c_pred = table.column("y_pred");
  if (c_run < 0 || c_row < 0 || c_true < 0 || c_pred < 0) {
    throw ParseError(path.string() + ": header must contain run_id,row_id,y_true,y_pred");
  }
  struct Entry {
    long row;
    double y_true, y_pred;
  };
  std::map<long, std::vector<Entry>> runs;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    double run = 0, idx = 0, yt = 0, yp = 0;
    if (!parse_real(row[c_run], run) || !parse_real(row[c_row], idx) ||
        !parse_real(row[c_true], yt) || !parse_real(row[c_pred], yp) || run != std::floor(run) ||
        idx != std::floor(idx)) {
      throw ParseError(path.string() + ":" + std::to_string(table.line_numbers[r]) +
                       ": malformed prediction row");
    }
    runs[static_cast<long>(run)].push_back({static_cast<long>(idx), yt, yp});
  }
  const std::string name = method_name.empty() ? path.stem().string() : method_name;
  std::vector<PredictionSet> out;
  for (auto& [run, entries] : runs) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.row < b.row; });
    PredictionSet set;
    set.method_name = name;
    set.run_id = static_cast<int>(run);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].row != static_cast<long>(i)) {
        throw ParseError(path.string() + ": run " + std::to_string(run) +
                         " row ids are not 0..n-1");
      }
      set.y_true.push_back(entries[i].y_true);
      set.y_pred.push_back(entries[i].y_pred);
    }
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace scfr
