#ifndef UIDTHAT_REGRESSION_LOGISTIC_H_
#define UIDTHAT_REGRESSION_LOGISTIC_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace uidthat::regression {

// Per-column mean and population (1/n) standard deviation.
struct ScalerParams {
  std::vector<std::string> names;
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

// Throws DataError with fewer than 2 rows or when a column is constant.
ScalerParams FitScaler(const Eigen::MatrixXd& x, const std::vector<std::string>& names);
Eigen::MatrixXd ApplyScaler(const ScalerParams& params, const Eigen::MatrixXd& x);

struct FitOptions {
  double tolerance = 1e-8;  // on the max-norm of the gradient
  int max_iter = 100;
  double ridge = 0.0;       // L2 penalty on slopes, never on the intercept
};

// beta[0] is the intercept; beta[j] multiplies column j-1 of x.
struct RegressionFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;  // inverse of the (penalized) information
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;                 // max-norm at beta
  std::vector<double> objective_trace;        // per accepted iteration
};

// Penalized objective l(beta) - ridge/2 * |slopes|^2 and its gradient.
double Objective(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                 const Eigen::VectorXd& y, double ridge = 0.0);
Eigen::VectorXd Gradient(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& y, double ridge = 0.0);
double LogLikelihood(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y);

// Newton/IRLS with step halving. x excludes the intercept column (it may
// have zero columns). y holds 0/1. Throws DataError on single-class labels,
// and on perfect separation when ridge is 0.
RegressionFit FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const FitOptions& options = {});

Eigen::VectorXd PredictProbability(const RegressionFit& fit, const Eigen::MatrixXd& x);
// Fraction of rows where (p >= 0.5) agrees with the label.
double Accuracy(const RegressionFit& fit, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y);

struct CvResult {
  double accuracy = 0.0;
  int folds_used = 0;  // folds whose training part could be scaled and fit
};

// Stratified k-fold accuracy on unscaled x: each training part gets its own
// scaler, applied to the held-out part. nullopt when no fold can be fit.
std::optional<CvResult> CrossValidatedAccuracy(const Eigen::MatrixXd& x,
                                               const Eigen::VectorXd& y, int folds,
                                               std::uint64_t seed,
                                               const FitOptions& options = {});

struct Coefficient {
  std::string name;
  double beta = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  std::string stars;
};

struct RegressionSummary {
  std::vector<Coefficient> coefficients;
  int n = 0;
  double log_likelihood = 0.0;
  int iterations = 0;
  double accuracy = 0.0;  // in-sample
  std::optional<CvResult> cv;
};

// "***" below 0.001, "**" below 0.01, otherwise empty.
std::string Stars(double p_value);

// Wald statistics: se from the covariance diagonal, 95% normal CI and a
// two-sided p-value. names excludes the intercept, which is named "const".
// Throws DataError for a fit that did not converge.
RegressionSummary WaldSummary(const RegressionFit& fit,
                              const std::vector<std::string>& names);

// Aligned text: predictor, beta, [0.025, 0.975], p-value, stars.
std::string FormatSummary(const RegressionSummary& summary, const std::string& title);
std::string SummaryJson(const RegressionSummary& summary, const std::string& scope,
                        const ScalerParams& scaler);

}  // namespace uidthat::regression

#endif  // UIDTHAT_REGRESSION_LOGISTIC_H_
