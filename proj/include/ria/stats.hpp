#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace ria {

/// Upper-tail probability of a chi-squared(df) variate.
inline double chi2_sf(double x, double df = 1.0) {
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

inline double normal_sf(double z) {
  boost::math::normal dist;
  return boost::math::cdf(boost::math::complement(dist, z));
}

/// Two-sided p-value for a t statistic.
inline double t_pvalue(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

/// Two-sided p-value under the standard normal.
inline double z_pvalue(double z) {
  return 2.0 * normal_sf(std::fabs(z));
}

}  // namespace ria
