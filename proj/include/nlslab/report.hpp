#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace nlslab {

// Structured record of one experiment run: named scalar series, named
// scalars, and boolean verdicts, plus provenance (seed and a hash of the
// effective configuration).  Maps keep keys sorted so emission is
// byte-stable for fixed inputs.
struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, double> scalars;
  std::map<std::string, bool> verdicts;

  bool all_pass() const {
    for (const auto& [k, v] : verdicts)
      if (!v) return false;
    return true;
  }
};

inline bool strictly_decreasing(const std::vector<double>& s) {
  if (s.empty()) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] < s[i - 1])) return false;
  return true;
}

inline bool non_increasing(const std::vector<double>& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] > s[i - 1]) return false;
  return !s.empty();
}

// max/min over positive entries; +inf when any entry is non-positive
inline double spread_factor(const std::vector<double>& s) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : s) {
    if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return s.empty() ? std::numeric_limits<double>::infinity() : hi / lo;
}

struct LogLogFit {
  double slope = 0.0;
  double r2 = 0.0;
};

// least-squares fit of log(y) against log(x); entries must be positive
inline LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return {};
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::log(x[i]);
    const double b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    syy += b * b;
  }
  const double dn = static_cast<double>(n);
  const double vx = sxx - sx * sx / dn;
  const double vy = syy - sy * sy / dn;
  const double cxy = sxy - sx * sy / dn;
  LogLogFit fit;
  if (vx > 0.0) fit.slope = cxy / vx;
  if (vx > 0.0 && vy > 0.0) fit.r2 = (cxy * cxy) / (vx * vy);
  return fit;
}

}  // namespace nlslab
