#pragma once

#include <cmath>

#include "recvrp/errors.hpp"

namespace recvrp {

// Summary of a normal random variable. The variance is stored rather than
// the standard deviation: accumulation along a route is a plain sum of
// variances, evaluated as a left fold in route order.
struct NormalSummary {
  double mu = 0.0;
  double var = 0.0;

  double sigma() const { return std::sqrt(var); }
};

inline NormalSummary sum(const NormalSummary& a, const NormalSummary& b) {
  return {a.mu + b.mu, a.var + b.var};
}

// Standard normal inverse CDF. Absolute error below 1e-9 on (0,1);
// quantile(0.5) is exactly 0. Throws DomainError outside (0,1).
double quantile(double p);

// CDF of the standard normal, via erfc. Used by quantile's refinement step.
double normal_cdf(double z);

// Value exceeded with probability p: mu - quantile(p) * sigma.
double robust_lower(const NormalSummary& x, double p);

// Value that bounds X from above with probability p: mu + quantile(p) * sigma.
double robust_upper(const NormalSummary& x, double p);

}  // namespace recvrp
