#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace idio {

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

// sample standard deviation
inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

inline double minimum(const std::vector<double>& v) {
  double m = v.front();
  for (double x : v) m = std::min(m, x);
  return m;
}

inline double maximum(const std::vector<double>& v) {
  double m = v.front();
  for (double x : v) m = std::max(m, x);
  return m;
}

// One-tailed Welch t-test for H1: mean(a) < mean(b).
inline double one_tailed_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("t-test needs at least two values per sample");
  double ma = mean(a), mb = mean(b);
  double va = stddev(a) * stddev(a), vb = stddev(b) * stddev(b);
  double sa = va / a.size(), sb = vb / b.size();
  double se2 = sa + sb;
  if (se2 <= 0.0) return ma < mb ? 0.0 : 0.5;  // both samples constant
  double t = (ma - mb) / std::sqrt(se2);
  // Welch-Satterthwaite degrees of freedom
  double df = se2 * se2 / (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
  boost::math::students_t_distribution<double> dist(df);
  return boost::math::cdf(dist, t);
}

// Symmetric-t confidence interval half-width for the sample mean.
inline double confidence_half_width(const std::vector<double>& v, double level = 0.95) {
  if (v.size() < 2) return 0.0;
  boost::math::students_t_distribution<double> dist(static_cast<double>(v.size() - 1));
  double tq = boost::math::quantile(dist, 0.5 + level / 2.0);
  return tq * stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

// Eq-(17) style calibration: ratio of mean time to mean stall count.
inline double compute_phi(const std::vector<double>& times, const std::vector<double>& stalls,
                          double fallback = 9.08) {
  double ns = mean(stalls);
  if (ns <= 0.0) return fallback;
  return mean(times) / ns;
}

}  // namespace idio
