#include "scfr/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scfr/csv.hpp"
#include "scfr/errors.hpp"
#include "scfr/random.hpp"

namespace scfr {

Dataset Dataset::select_rows(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.target_name = target_name;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    out.target[static_cast<Eigen::Index>(i)] = target[rows[i]];
  }
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column) {
  const CsvTable table = read_csv_table(path);
  const int target_col = table.column(target_column);
  if (target_col < 0) {
    throw DataError(path.string() + ": target column '" + target_column + "' not found");
  }
  Dataset ds;
  ds.target_name = target_column;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<int>(c) != target_col) ds.feature_names.push_back(table.header[c]);
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto m = static_cast<Eigen::Index>(ds.feature_names.size());
  ds.features.resize(n, m);
  ds.target.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      double value = 0.0;
      if (!parse_real(row[c], value)) {
        throw DataError(path.string() + ": line " + std::to_string(table.line_numbers[r]) +
                        " (data row " + std::to_string(r + 1) + "), column '" +
                        table.header[c] + "': " +
                        (row[c].empty() ? "missing value" : "not a finite number: '" + row[c] + "'"));
      }
      if (static_cast<int>(c) == target_col) {
        ds.target[r] = value;
      } else {
        ds.features(r, j++) = value;
      }
    }
  }
  return ds;
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  for (const auto& name : ds.feature_names) out << name << ',';
  out << ds.target_name << '\n';
  for (Eigen::Index r = 0; r < ds.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.cols(); ++c) out << format_real(ds.features(r, c)) << ',';
    out << format_real(ds.target[r]) << '\n';
  }
  return out.str();
}

const char* protocol_name(Protocol p) {
  return p == Protocol::kOutOfSample ? "oos" : "ood";
}

SplitPair split_out_of_sample(const Dataset& ds, std::uint64_t seed) {
  const Eigen::Index n = ds.rows();
  if (n < 3) throw DataError("out-of-sample split needs at least 3 rows");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  rng.shuffle(std::span(order));
  const auto n_train = static_cast<std::size_t>(2 * n / 3);

  SplitPair out;
  out.protocol = Protocol::kOutOfSample;
  out.seed = seed;
  out.train_rows.assign(order.begin(), order.begin() + n_train);
  out.test_rows.assign(order.begin() + n_train, order.end());
  out.train = ds.select_rows(out.train_rows);
  out.test = ds.select_rows(out.test_rows);
  return out;
}

SplitPair split_out_of_domain(const Dataset& ds, std::uint64_t seed, double quantile,
                              double subsample) {
  const Eigen::Index n = ds.rows();
  if (!(quantile > 0.0 && quantile < 1.0)) throw DataError("quantile must lie in (0, 1)");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw DataError("subsample must lie in (0, 1]");
  if (n < 2 || ds.target.minCoeff() == ds.target.maxCoeff()) {
    throw DataError("out-of-domain split needs at least two distinct target values");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ds.target[a] < ds.target[b]; });

  auto cut = static_cast<std::size_t>(std::floor(quantile * static_cast<double>(n)));
  cut = std::clamp<std::size_t>(cut, 1, order.size() - 1);
  // Rows tied with the first test-pool value move to the test pool; if that
  // empties the train pool, the tie group goes to the train pool instead.
  const double boundary = ds.target[order[cut]];
  std::size_t lower = cut;
  while (lower > 0 && ds.target[order[lower - 1]] == boundary) --lower;
  if (lower == 0) {
    while (cut < order.size() && ds.target[order[cut]] == boundary) ++cut;
  } else {
    cut = lower;
  }
  if (cut == 0 || cut == order.size()) {
    throw DataError("out-of-domain split: quantile leaves an empty pool");
  }

  std::vector<Eigen::Index> train_pool(order.begin(), order.begin() + cut);
  std::vector<Eigen::Index> test_pool(order.begin() + cut, order.end());
  const double threshold = ds.target[test_pool.front()];

  Rng rng(seed);
  const auto take = [&](std::vector<Eigen::Index> pool) {
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(subsample * static_cast<double>(pool.size()))));
    rng.shuffle(std::span(pool));
    pool.resize(keep);
    return pool;
  };

  SplitPair out;
  out.protocol = Protocol::kOutOfDomain;
  out.seed = seed;
  out.threshold = threshold;
  out.train_rows = take(std::move(train_pool));
  out.test_rows = take(std::move(test_pool));
  out.train = ds.select_rows(out.train_rows);
  out.test = ds.select_rows(out.test_rows);
  return out;
}

MinMaxParams minmax_fit(const Dataset& train) {
  if (train.rows() == 0) throw DataError("min-max scaling needs at least one row");
  MinMaxParams p;
  p.feature_min = train.features.colwise().minCoeff().transpose();
  p.feature_max = train.features.colwise().maxCoeff().transpose();
  p.target_min = train.target.minCoeff();
  p.target_max = train.target.maxCoeff();
  return p;
}

namespace {

double scale(double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }

}  // namespace

Dataset minmax_apply(const MinMaxParams& params, const Dataset& ds) {
  if (params.feature_min.size() != ds.cols()) {
    throw StructuralError("min-max parameters cover " + std::to_string(params.feature_min.size()) +
                          " columns, dataset has " + std::to_string(ds.cols()));
  }
  Dataset out = ds;
  for (Eigen::Index c = 0; c < ds.cols(); ++c) {
    for (Eigen::Index r = 0; r < ds.rows(); ++r) {
      out.features(r, c) = scale(ds.features(r, c), params.feature_min[c], params.feature_max[c]);
    }
  }
  for (Eigen::Index r = 0; r < ds.rows(); ++r) {
    out.target[r] = scale(ds.target[r], params.target_min, params.target_max);
  }
  return out;
}

Eigen::VectorXd minmax_restore_target(const MinMaxParams& params, const Eigen::VectorXd& scaled) {
  const double span = params.target_max - params.target_min;
  return (scaled.array() * span + params.target_min).matrix();
}

namespace {

template <typename F>
Dataset generate(const SynthParams& p, F&& f, const char* name) {
  if (p.n < 1) throw DataError("generator needs n >= 1");
  if (!(p.x_lo <= p.x_hi)) throw DataError("generator range must satisfy lo <= hi");
  if (!(p.noise_sd >= 0.0)) throw DataError("noise standard deviation must be >= 0");
  Dataset ds;
  ds.feature_names = {"x"};
  ds.target_name = name;
  ds.features.resize(p.n, 1);
  ds.target.resize(p.n);
  Rng rng(p.seed);
  for (int i = 0; i < p.n; ++i) {
    const double x =
        p.n == 1 ? p.x_lo : p.x_lo + (p.x_hi - p.x_lo) * static_cast<double>(i) / (p.n - 1);
    ds.features(i, 0) = x;
    ds.target[i] = f(x) + p.noise_sd * rng.normal();
  }
  return ds;
}

}  // namespace

Dataset gen_gamma(const SynthParams& p) {
  // Poles at 0, -1, -2, ...: reject any range containing one.
  if (p.x_lo <= 0.0 && std::floor(p.x_hi) >= std::ceil(p.x_lo)) {
    throw DataError("gamma range [" + format_real(p.x_lo) + ", " + format_real(p.x_hi) +
                    "] contains a pole");
  }
  return generate(p, [](double x) { return std::tgamma(x); }, "y");
}

Dataset gen_sinc(const SynthParams& p) {
  return generate(p, [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }, "y");
}

}  // namespace scfr
