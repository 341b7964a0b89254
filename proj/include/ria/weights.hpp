#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ria/common.hpp"
#include "ria/panel.hpp"

namespace ria {

enum class WeightKind { binary_contiguity, inverse_distance };

/// Great-circle distance in kilometers between (lon, lat) points in degrees.
inline double haversine_km(double lon1, double lat1, double lon2, double lat2) {
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  double phi1 = lat1 * kDegToRad, phi2 = lat2 * kDegToRad;
  double dphi = (lat2 - lat1) * kDegToRad;
  double dlambda = (lon2 - lon1) * kDegToRad;
  double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
             std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) *
                 std::sin(dlambda / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

/// n x n spatial weights. `base` keeps the pre-standardization (symmetric)
/// entries so the real spectrum stays computable after row standardization.
struct WeightMatrix {
  WeightKind kind = WeightKind::binary_contiguity;
  Eigen::MatrixXd entries;
  Eigen::MatrixXd base;
  bool row_standardized = false;
  std::vector<std::string> region_order;

  std::size_t size() const { return region_order.size(); }

  double sum() const { return entries.sum(); }

  /// Real eigenvalues of `entries`. Row-standardized W = D^-1 B is similar
  /// to D^-1/2 B D^-1/2, so a symmetric solve suffices either way.
  Eigen::VectorXd eigenvalues() const {
    const Eigen::Index n = entries.rows();
    if (!row_standardized) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(base);
      return es.eigenvalues();
    }
    Eigen::VectorXd rowsum = base.rowwise().sum();
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i)
      s(i) = rowsum(i) > 0 ? 1.0 / std::sqrt(rowsum(i)) : 0.0;
    Eigen::MatrixXd sym = s.asDiagonal() * base * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    return es.eigenvalues();
  }

  void check_invariants() const {
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
      if (entries(i, i) != 0.0)
        throw numeric_error("weight matrix has nonzero diagonal");
      for (Eigen::Index j = 0; j < entries.cols(); ++j)
        if (entries(i, j) < 0.0)
          throw numeric_error("weight matrix has negative entry");
      if (row_standardized) {
        double rs = entries.row(i).sum();
        if (rs > 0.0 && std::fabs(rs - 1.0) > 1e-12)
          throw numeric_error("row-standardized row does not sum to 1");
      }
    }
  }
};

/// Build contiguity (0/1 adjacency) or inverse great-circle-distance
/// weights over `regions`, optionally row-standardized.
inline WeightMatrix build_weight_matrix(const std::vector<Region>& regions,
                                        WeightKind kind,
                                        bool row_standardize) {
  const std::size_t n = regions.size();
  WeightMatrix w;
  w.kind = kind;
  w.row_standardized = row_standardize;
  w.base = Eigen::MatrixXd::Zero(n, n);
  for (const auto& r : regions) w.region_order.push_back(r.id);

  if (kind == WeightKind::binary_contiguity) {
    std::vector<std::string> islands;
    for (std::size_t i = 0; i < n; ++i)
      if (regions[i].neighbors.empty()) islands.push_back(regions[i].id);
    if (!islands.empty()) {
      std::string msg = "contiguity weights require neighbors; islands:";
      for (const auto& id : islands) msg += " " + id;
      throw data_error(msg);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && regions[i].neighbors.count(regions[j].id))
          w.base(i, j) = 1.0;
    if (!w.base.isApprox(w.base.transpose()))
      throw data_error("contiguity adjacency is not symmetric");
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (!regions[i].centroid)
        throw data_error("inverse-distance weights require centroids; region '" +
                         regions[i].id + "' has none");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        auto [lon1, lat1] = *regions[i].centroid;
        auto [lon2, lat2] = *regions[j].centroid;
        double d = haversine_km(lon1, lat1, lon2, lat2);
        if (d <= 0.0)
          throw data_error("coincident centroids for '" + regions[i].id +
                           "' and '" + regions[j].id + "'");
        w.base(i, j) = w.base(j, i) = 1.0 / d;
      }
  }

  w.entries = w.base;
  if (row_standardize) {
    for (std::size_t i = 0; i < n; ++i) {
      double rs = w.entries.row(i).sum();
      if (rs > 0.0) w.entries.row(i) /= rs;
    }
  }
  w.check_invariants();
  return w;
}

}  // namespace ria
