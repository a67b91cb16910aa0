#include "leakstudy/ols.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <fmt/format.h>

#include "leakstudy/error.hpp"

namespace leakstudy {

namespace {

std::string column_name(const std::vector<std::string>& names, Eigen::Index j) {
  if (static_cast<std::size_t>(j) < names.size()) return names[static_cast<std::size_t>(j)];
  return fmt::format("c{}", j);
}

[[noreturn]] void singular(const std::vector<std::string>& names, const std::vector<Eigen::Index>& cols,
                           const std::string& why) {
  std::string list;
  for (auto j : cols) {
    if (!list.empty()) list += ", ";
    list += column_name(names, j);
  }
  throw Error(ErrorCode::SingularDesign, fmt::format("singular design ({}); columns: {}", why, list));
}

}  // namespace

OlsResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const OlsOptions& options,
              const std::vector<std::string>& names) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw Error(ErrorCode::Validation, "ols: y and X row counts differ");
  if (p == 0) throw Error(ErrorCode::Validation, "ols: design has no columns");
  if (n <= p) {
    throw Error(ErrorCode::SingularDesign,
                fmt::format("ols: {} observations cannot identify {} coefficients", n, p));
  }
  if (!X.allFinite() || !y.allFinite()) throw Error(ErrorCode::Domain, "ols: non-finite input");

  // Equilibrate columns so the condition guard ignores pure unit scaling.
  Eigen::VectorXd scale = X.colwise().norm().transpose();
  std::vector<Eigen::Index> zero_cols;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (scale(j) == 0.0) zero_cols.push_back(j);
  }
  if (!zero_cols.empty()) singular(names, zero_cols, "all-zero column");
  const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(p - 1);
  const double condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(condition <= options.max_condition)) {
    const Eigen::VectorXd v = svd.matrixV().col(p - 1).cwiseAbs();
    const double vmax = v.maxCoeff();
    std::vector<Eigen::Index> involved;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (v(j) >= 0.05 * vmax) involved.push_back(j);
    }
    singular(names, involved, fmt::format("condition number {:.3g}", condition));
  }

  OlsResult out;
  out.n = static_cast<int>(n);
  out.df_resid = static_cast<int>(n - p);
  out.condition = condition;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  const Eigen::VectorXd bs = qr.solve(y);
  out.coefficients = bs.cwiseQuotient(scale);
  out.residuals = y - X * out.coefficients;
  out.ssr = out.residuals.squaredNorm();

  const double df = static_cast<double>(out.df_resid);
  out.residual_std = std::sqrt(out.ssr / df);

  // (Xs'Xs)^-1 = V diag(1/s^2) V'; undo the column scaling afterwards.
  const Eigen::MatrixXd& V = svd.matrixV();
  const Eigen::MatrixXd xtx_inv_s = V * sv.array().square().inverse().matrix().asDiagonal() * V.transpose();
  Eigen::MatrixXd cov;
  if (options.robust) {
    const Eigen::MatrixXd meat =
        Xs.transpose() * out.residuals.array().square().matrix().asDiagonal() * Xs;
    cov = xtx_inv_s * meat * xtx_inv_s * (static_cast<double>(n) / df);
  } else {
    cov = xtx_inv_s * (out.ssr / df);
  }
  out.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt().cwiseQuotient(scale);

  if (options.has_intercept) {
    out.sst = (y.array() - y.mean()).square().sum();
  } else {
    out.sst = y.squaredNorm();
  }
  out.r2 = out.sst > 0.0 ? std::clamp(1.0 - out.ssr / out.sst, 0.0, 1.0) : 0.0;

  const Eigen::Index slopes = options.has_intercept ? p - 1 : p;
  if (slopes > 0 && out.sst > 0.0) {
    const double explained = std::max(out.sst - out.ssr, 0.0);
    if (out.ssr > 0.0) {
      const double f = (explained / static_cast<double>(slopes)) / (out.ssr / df);
      out.f_stat = f;
      const boost::math::fisher_f dist(static_cast<double>(slopes), df);
      out.f_p_value = boost::math::cdf(boost::math::complement(dist, f));
    } else {
      out.f_stat = std::numeric_limits<double>::infinity();
      out.f_p_value = 0.0;
    }
  }
  return out;
}

}  // namespace leakstudy
