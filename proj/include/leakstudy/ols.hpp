#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace leakstudy {

inline constexpr double kMaxDesignCondition = 1e10;

struct OlsOptions {
  // Column 0 of X is a constant; R-squared and F are then centered.
  bool has_intercept = false;
  // White (HC1) standard errors instead of classical ones.
  bool robust = false;
  double max_condition = kMaxDesignCondition;
};

struct OlsResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd residuals;
  double residual_std = 0.0;
  double r2 = 0.0;
  std::optional<double> f_stat;
  std::optional<double> f_p_value;
  double ssr = 0.0;
  double sst = 0.0;
  int n = 0;
  int df_resid = 0;
  // Condition number of the column-equilibrated design.
  double condition = 1.0;
};

// Least squares through column-pivoted Householder QR. A design whose
// equilibrated condition number exceeds max_condition, or with fewer rows
// than columns plus one, raises SingularDesign; the message names the columns
// involved in the near dependency (`names` when given, else c0, c1, ...).
OlsResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const OlsOptions& options = {},
              const std::vector<std::string>& names = {});

}  // namespace leakstudy
