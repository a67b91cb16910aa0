#include "leakstudy/inference.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "leakstudy/error.hpp"

namespace leakstudy {

double t_p_value(double t, double df, Tail tail) {
  if (!(df > 0.0)) throw Error(ErrorCode::InferenceUnavailable, "t test needs positive degrees of freedom");
  if (std::isnan(t)) throw Error(ErrorCode::Domain, "t statistic is NaN");
  double upper = 0.0;
  if (std::isinf(t)) {
    upper = 0.0;
  } else {
    const boost::math::students_t dist(df);
    upper = boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  }
  return tail == Tail::OneSided ? upper : std::min(1.0, 2.0 * upper);
}

double t_critical_two_sided(double alpha, double df) {
  const boost::math::students_t dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

MeanTest mean_test(std::span<const double> xs, Tail tail) {
  MeanTest out;
  out.n = static_cast<int>(xs.size());
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  out.estimate = sum / n;
  if (xs.size() < 2) return out;

  double ss = 0.0;
  for (double x : xs) ss += (x - out.estimate) * (x - out.estimate);
  const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  out.std_err = se;
  if (se > 0.0) {
    out.t = out.estimate / se;
  } else if (out.estimate != 0.0) {
    out.t = std::copysign(std::numeric_limits<double>::infinity(), out.estimate);
  } else {
    out.t = 0.0;
  }
  if (*out.t == 0.0) {
    out.p = tail == Tail::OneSided ? 0.5 : 1.0;
  } else {
    out.p = t_p_value(*out.t, n - 1.0, tail);
  }
  return out;
}

}  // namespace leakstudy
