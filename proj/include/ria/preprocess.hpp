#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ria/common.hpp"
#include "ria/panel.hpp"

namespace ria {

/// Per-indicator normalization bounds: the 5%/95% pooled quantiles, plus
/// the non-negativity shift applied before they were taken.
struct EfficacyBounds {
  std::string indicator_id;
  double x_l = 0.0;
  double x_h = 0.0;
  double shift = 0.0;
};

enum class WeightMethod { entropy, coefficient_of_variation, blended };

struct WeightVector {
  WeightMethod method = WeightMethod::entropy;
  std::vector<std::string> indicator_ids;
  std::vector<double> values;  // >= 0, sums to 1

  double weight_of(const std::string& id) const {
    for (std::size_t i = 0; i < indicator_ids.size(); ++i)
      if (indicator_ids[i] == id) return values[i];
    throw data_error("no weight for indicator '" + id + "'");
  }

  void validate() const {
    double total = 0.0;
    for (double v : values) {
      if (v < 0.0) throw numeric_error("negative weight");
      total += v;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw numeric_error("weights do not sum to 1");
  }
};

/// Composite scores per region-year: per-indicator d in [0,100], per-dimension
/// aggregates (weights renormalized within each dimension), the
/// weight-averaged composite, and the subsystem score composite/100.
struct ScoreTable {
  std::vector<std::string> region_ids;
  std::vector<int> years;
  std::vector<std::string> indicator_ids;
  std::vector<std::string> dimensions;
  WeightVector weights;
  std::vector<EfficacyBounds> bounds;

  std::vector<double> indicator_scores;  // (r * Y + y) * K + k
  std::vector<double> dimension_scores;  // (r * Y + y) * D + d
  std::vector<double> composite;         // r * Y + y

  std::size_t n_regions() const { return region_ids.size(); }
  std::size_t n_years() const { return years.size(); }

  double indicator_score(std::size_t r, std::size_t y, std::size_t k) const {
    return indicator_scores[(r * years.size() + y) * indicator_ids.size() + k];
  }
  double dimension_score(std::size_t r, std::size_t y, std::size_t d) const {
    return dimension_scores[(r * years.size() + y) * dimensions.size() + d];
  }
  double composite_score(std::size_t r, std::size_t y) const {
    return composite[r * years.size() + y];
  }
  /// Subsystem score in [0,1].
  double subsystem_score(std::size_t r, std::size_t y) const {
    return composite_score(r, y) / 100.0;
  }
};

/// Fill missing cells per (region, indicator) series along the year axis:
/// interior gaps by linear interpolation, edge gaps by the series mean.
/// A fully missing series falls back to the indicator's cross-region year
/// mean (warned); an indicator missing everywhere is a hard error.
inline PanelDataset impute_missing(const PanelDataset& panel,
                                   warning_log* warnings = nullptr) {
  PanelDataset out = panel;
  const std::size_t R = panel.n_regions(), Y = panel.n_years(),
                    K = panel.n_indicators();

  // cross-region year means, for the all-missing-series fallback
  std::vector<double> year_mean(Y * K, PanelDataset::missing());
  for (std::size_t k = 0; k < K; ++k) {
    bool any = false;
    for (std::size_t y = 0; y < Y; ++y) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t r = 0; r < R; ++r) {
        double v = panel.at(r, y, k);
        if (!PanelDataset::is_missing(v)) {
          sum += v;
          ++n;
        }
      }
      if (n) {
        year_mean[y * K + k] = sum / static_cast<double>(n);
        any = true;
      }
    }
    if (!any)
      throw data_error("indicator '" + panel.schema[k].id +
                       "' has no observed values in any region or year");
  }

  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<std::size_t> observed;
      for (std::size_t y = 0; y < Y; ++y)
        if (!PanelDataset::is_missing(panel.at(r, y, k))) observed.push_back(y);

      if (observed.empty()) {
        warn(warnings, "series (" + panel.regions[r].id + ", " +
                           panel.schema[k].id +
                           ") entirely missing; filled with cross-region year means");
        for (std::size_t y = 0; y < Y; ++y) {
          double m = year_mean[y * K + k];
          if (PanelDataset::is_missing(m)) {
            // no region observed this year either; carry the pooled mean
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t yy = 0; yy < Y; ++yy)
              if (!PanelDataset::is_missing(year_mean[yy * K + k])) {
                sum += year_mean[yy * K + k];
                ++n;
              }
            m = sum / static_cast<double>(n);
          }
          out.at(r, y, k) = m;
        }
        continue;
      }

      double series_mean = 0.0;
      for (std::size_t y : observed) series_mean += panel.at(r, y, k);
      series_mean /= static_cast<double>(observed.size());

      for (std::size_t y = 0; y < Y; ++y) {
        if (!PanelDataset::is_missing(panel.at(r, y, k))) continue;
        auto next = std::lower_bound(observed.begin(), observed.end(), y);
        if (next == observed.begin() || next == observed.end()) {
          out.at(r, y, k) = series_mean;  // leading/trailing gap
          continue;
        }
        std::size_t hi = *next, lo = *(next - 1);
        double vlo = panel.at(r, lo, k), vhi = panel.at(r, hi, k);
        double t = static_cast<double>(panel.years[y] - panel.years[lo]) /
                   static_cast<double>(panel.years[hi] - panel.years[lo]);
        out.at(r, y, k) = vlo + t * (vhi - vlo);
      }
    }
  }
  return out;
}

/// Map negative-direction indicators through x -> min + max - x over the
/// pooled sample, so larger is better everywhere; marks all directions
/// positive in the output schema. Requires a fully imputed panel.
inline PanelDataset reverse_negative(const PanelDataset& panel) {
  if (panel.missing_count() > 0)
    throw data_error("reverse_negative requires a fully imputed panel");
  PanelDataset out = panel;
  const std::size_t R = panel.n_regions(), Y = panel.n_years(),
                    K = panel.n_indicators();
  for (std::size_t k = 0; k < K; ++k) {
    if (panel.schema[k].direction != Direction::negative) continue;
    double lo = panel.at(0, 0, k), hi = lo;
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t y = 0; y < Y; ++y) {
        lo = std::min(lo, panel.at(r, y, k));
        hi = std::max(hi, panel.at(r, y, k));
      }
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t y = 0; y < Y; ++y)
        out.at(r, y, k) = lo + hi - panel.at(r, y, k);
    out.schema[k].direction = Direction::positive;
  }
  return out;
}

/// Quantile with linear interpolation between order statistics (the common
/// "type 7" estimator) on already-sorted data.
inline double interpolated_quantile(const std::vector<double>& sorted,
                                    double q) {
  if (sorted.empty()) throw numeric_error("quantile of empty sample");
  double h = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Clamp each indicator into its pooled [q_lower, q_upper] quantile bounds.
/// Indicators with negative values are first shifted by -min so the power
/// normalization stays monotone. Returns the clamped panel plus bounds.
inline std::pair<PanelDataset, std::vector<EfficacyBounds>> winsorize(
    const PanelDataset& panel, double lower_q = 0.05, double upper_q = 0.95,
    warning_log* warnings = nullptr) {
  if (panel.missing_count() > 0)
    throw data_error("winsorize requires a fully imputed panel");
  if (!(lower_q >= 0.0 && upper_q <= 1.0 && lower_q < upper_q))
    throw config_error("winsorize quantiles must satisfy 0 <= lo < hi <= 1");
  PanelDataset out = panel;
  std::vector<EfficacyBounds> bounds;
  const std::size_t R = panel.n_regions(), Y = panel.n_years(),
                    K = panel.n_indicators();
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> pooled;
    pooled.reserve(R * Y);
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t y = 0; y < Y; ++y) pooled.push_back(panel.at(r, y, k));
    double minv = *std::min_element(pooled.begin(), pooled.end());
    double shift = minv < 0.0 ? -minv : 0.0;
    if (shift > 0.0) {
      warn(warnings, "indicator '" + panel.schema[k].id + "' shifted by " +
                         std::to_string(shift) + " to remove negative values");
      for (double& v : pooled) v += shift;
    }
    std::sort(pooled.begin(), pooled.end());
    EfficacyBounds b;
    b.indicator_id = panel.schema[k].id;
    b.shift = shift;
    b.x_l = interpolated_quantile(pooled, lower_q);
    b.x_h = interpolated_quantile(pooled, upper_q);
    if (!(b.x_h > b.x_l))
      throw data_error("indicator '" + panel.schema[k].id +
                       "' is degenerate: identical quantile bounds");
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t y = 0; y < Y; ++y)
        out.at(r, y, k) = std::clamp(panel.at(r, y, k) + shift, b.x_l, b.x_h);
    bounds.push_back(std::move(b));
  }
  return {std::move(out), std::move(bounds)};
}

/// Power-form efficacy normalization onto [0, 100]:
///   d = (x^2 - x_l^2) / (x_h^2 - x_l^2) * 100.
/// Strictly increasing on [x_l, x_h] for x_l >= 0 (winsorize guarantees it).
inline double efficacy_score(double x, const EfficacyBounds& b) {
  if (x < b.x_l || x > b.x_h)
    throw numeric_error("efficacy input " + std::to_string(x) +
                        " outside bounds for '" + b.indicator_id +
                        "' (pipeline ordering bug)");
  return (x * x - b.x_l * b.x_l) / (b.x_h * b.x_h - b.x_l * b.x_l) * 100.0;
}

/// Apply efficacy_score cellwise; values must already be winsorized.
inline PanelDataset score_panel(const PanelDataset& panel,
                                const std::vector<EfficacyBounds>& bounds) {
  if (bounds.size() != panel.n_indicators())
    throw data_error("bounds do not cover the schema");
  PanelDataset out = panel;
  for (std::size_t k = 0; k < panel.n_indicators(); ++k) {
    if (bounds[k].indicator_id != panel.schema[k].id)
      throw data_error("bounds order does not match schema");
    for (std::size_t r = 0; r < panel.n_regions(); ++r)
      for (std::size_t y = 0; y < panel.n_years(); ++y)
        out.at(r, y, k) = efficacy_score(panel.at(r, y, k), bounds[k]);
  }
  return out;
}

namespace detail {

/// Pooled region-year x indicator score matrix.
inline Eigen::MatrixXd pooled_scores(const PanelDataset& scored) {
  const std::size_t R = scored.n_regions(), Y = scored.n_years(),
                    K = scored.n_indicators();
  Eigen::MatrixXd m(R * Y, K);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t y = 0; y < Y; ++y)
      for (std::size_t k = 0; k < K; ++k)
        m(r * Y + y, k) = scored.at(r, y, k);
  return m;
}

}  // namespace detail

/// Entropy weights over a nonnegative score matrix (rows = pooled
/// region-year observations): p_ij = d_ij / sum_i d_ij,
/// e_j = -(1/ln N) sum_i p_ij ln p_ij with 0 ln 0 := 0,
/// w_j = (1 - e_j) / sum_j (1 - e_j).
inline WeightVector entropy_weights_matrix(
    const Eigen::MatrixXd& scores, const std::vector<std::string>& ids,
    warning_log* warnings = nullptr) {
  const Eigen::Index N = scores.rows(), K = scores.cols();
  if (N < 2) throw data_error("entropy weights need at least 2 observations");
  if (scores.minCoeff() < 0.0)
    throw data_error("entropy weights require nonnegative scores");
  Eigen::VectorXd divergence(K);
  for (Eigen::Index j = 0; j < K; ++j) {
    double colsum = scores.col(j).sum();
    if (colsum <= 0.0)
      throw data_error("all-zero score column '" + ids[j] + "'");
    double h = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      double p = scores(i, j) / colsum;
      if (p > 0.0) h += p * std::log(p);
    }
    double e = -h / std::log(static_cast<double>(N));
    divergence(j) = 1.0 - e;
    if (divergence(j) < 0.0) divergence(j) = 0.0;  // guard rounding
  }
  WeightVector w;
  w.method = WeightMethod::entropy;
  w.indicator_ids = ids;
  double total = divergence.sum();
  if (total <= 0.0) {
    warn(warnings,
         "all columns carry zero divergence; falling back to uniform weights");
    w.values.assign(K, 1.0 / static_cast<double>(K));
  } else {
    for (Eigen::Index j = 0; j < K; ++j)
      w.values.push_back(divergence(j) / total);
  }
  w.validate();
  return w;
}

inline WeightVector entropy_weights(const PanelDataset& scored,
                                    warning_log* warnings = nullptr) {
  std::vector<std::string> ids;
  for (const auto& s : scored.schema) ids.push_back(s.id);
  return entropy_weights_matrix(detail::pooled_scores(scored), ids, warnings);
}

/// Coefficient-of-variation weights: w_j proportional to sd_j / mean_j.
inline WeightVector cv_weights_matrix(const Eigen::MatrixXd& scores,
                                      const std::vector<std::string>& ids) {
  const Eigen::Index N = scores.rows(), K = scores.cols();
  if (N < 2) throw data_error("cv weights need at least 2 observations");
  Eigen::VectorXd cv(K);
  for (Eigen::Index j = 0; j < K; ++j) {
    double mean = scores.col(j).mean();
    if (mean <= 0.0)
      throw data_error("cv weights require positive column means ('" + ids[j] +
                       "')");
    double ss = (scores.col(j).array() - mean).square().sum() /
                static_cast<double>(N - 1);
    cv(j) = std::sqrt(ss) / mean;
  }
  double total = cv.sum();
  if (total <= 0.0) throw data_error("all columns constant; cv weights undefined");
  WeightVector w;
  w.method = WeightMethod::coefficient_of_variation;
  w.indicator_ids = ids;
  for (Eigen::Index j = 0; j < K; ++j) w.values.push_back(cv(j) / total);
  w.validate();
  return w;
}

inline WeightVector cv_weights(const PanelDataset& scored) {
  std::vector<std::string> ids;
  for (const auto& s : scored.schema) ids.push_back(s.id);
  return cv_weights_matrix(detail::pooled_scores(scored), ids);
}

/// Arithmetic mean of entropy and CV weights, renormalized.
inline WeightVector blended_weights(const WeightVector& entropy,
                                    const WeightVector& cv) {
  if (entropy.indicator_ids != cv.indicator_ids)
    throw data_error("blended weights need matching indicator sets");
  WeightVector w;
  w.method = WeightMethod::blended;
  w.indicator_ids = entropy.indicator_ids;
  double total = 0.0;
  for (std::size_t j = 0; j < entropy.values.size(); ++j) {
    w.values.push_back(0.5 * (entropy.values[j] + cv.values[j]));
    total += w.values.back();
  }
  for (double& v : w.values) v /= total;
  w.validate();
  return w;
}

inline WeightVector make_weights(const PanelDataset& scored, WeightMethod m,
                                 warning_log* warnings = nullptr) {
  switch (m) {
    case WeightMethod::entropy:
      return entropy_weights(scored, warnings);
    case WeightMethod::coefficient_of_variation:
      return cv_weights(scored);
    case WeightMethod::blended:
      return blended_weights(entropy_weights(scored, warnings),
                             cv_weights(scored));
  }
  throw config_error("unknown weight method");
}

/// Weighted aggregation of a scored panel: composite = sum_j w_j d_j, and
/// per-dimension scores with weights renormalized inside each dimension.
inline ScoreTable composite_scores(const PanelDataset& scored,
                                   const WeightVector& weights,
                                   std::vector<EfficacyBounds> bounds = {}) {
  const std::size_t R = scored.n_regions(), Y = scored.n_years(),
                    K = scored.n_indicators();
  ScoreTable table;
  for (const auto& r : scored.regions) table.region_ids.push_back(r.id);
  table.years = scored.years;
  for (const auto& s : scored.schema) table.indicator_ids.push_back(s.id);
  table.dimensions = scored.dimensions;
  table.weights = weights;
  table.bounds = std::move(bounds);

  std::vector<double> w(K);
  for (std::size_t k = 0; k < K; ++k)
    w[k] = weights.weight_of(scored.schema[k].id);

  const std::size_t D = table.dimensions.size();
  std::vector<double> dim_weight_sum(D, 0.0);
  std::vector<std::size_t> dim_of(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto it = std::find(table.dimensions.begin(), table.dimensions.end(),
                        scored.schema[k].dimension);
    dim_of[k] = static_cast<std::size_t>(it - table.dimensions.begin());
    dim_weight_sum[dim_of[k]] += w[k];
  }

  table.indicator_scores = scored.values;
  table.dimension_scores.assign(R * Y * D, 0.0);
  table.composite.assign(R * Y, 0.0);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t y = 0; y < Y; ++y) {
      double total = 0.0;
      std::vector<double> dim(D, 0.0);
      for (std::size_t k = 0; k < K; ++k) {
        double d = scored.at(r, y, k);
        total += w[k] * d;
        dim[dim_of[k]] += w[k] * d;
      }
      table.composite[r * Y + y] = total;
      for (std::size_t di = 0; di < D; ++di)
        table.dimension_scores[(r * Y + y) * D + di] =
            dim_weight_sum[di] > 0.0 ? dim[di] / dim_weight_sum[di] : 0.0;
    }
  return table;
}

}  // namespace ria
