#pragma once

#include <optional>
#include <span>

namespace leakstudy {

enum class Tail {
  // In the direction of the estimate's sign.
  OneSided,
  TwoSided,
};

// Student-t p-value for statistic t with df degrees of freedom. One-sided
// probabilities take the tail on the side of t's sign.
double t_p_value(double t, double df, Tail tail);

// Two-sided critical value |t| at level alpha.
double t_critical_two_sided(double alpha, double df);

struct MeanTest {
  int n = 0;
  double estimate = 0.0;
  std::optional<double> std_err;
  std::optional<double> t;
  std::optional<double> p;

  bool has_inference() const { return t.has_value(); }
};

// Cross-sectional mean with a t-test against zero: std_err = s / sqrt(n),
// df = n - 1. With n < 2 only the estimate is filled. Zero dispersion gives
// t = +-inf and p = 0 for a non-zero mean, t = 0 otherwise.
MeanTest mean_test(std::span<const double> xs, Tail tail = Tail::OneSided);

}  // namespace leakstudy
