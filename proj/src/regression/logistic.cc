#include "uidthat/regression/logistic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"
#include "uidthat/common/errors.h"

namespace uidthat::regression {
namespace {

constexpr double kZ975 = 1.959963984540054;
constexpr double kSeparationBeta = 50.0;
constexpr double kSaturated = 1e-6;
constexpr double kMaxVariance = 1e8;

Eigen::MatrixXd WithIntercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z(x.rows(), x.cols() + 1);
  z.col(0).setOnes();
  z.rightCols(x.cols()) = x;
  return z;
}

// log(1 + exp(t)) without overflow.
double Softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double Sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

Eigen::VectorXd Probabilities(const Eigen::VectorXd& beta, const Eigen::MatrixXd& z) {
  return (z * beta).unaryExpr([](double t) { return Sigmoid(t); });
}

double ZObjective(const Eigen::VectorXd& beta, const Eigen::MatrixXd& z,
                  const Eigen::VectorXd& y, double ridge) {
  Eigen::VectorXd eta = z * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - Softplus(eta[i]);
  return ll - 0.5 * ridge * beta.tail(beta.size() - 1).squaredNorm();
}

Eigen::VectorXd ZGradient(const Eigen::VectorXd& beta, const Eigen::MatrixXd& z,
                          const Eigen::VectorXd& y, double ridge) {
  Eigen::VectorXd g = z.transpose() * (y - Probabilities(beta, z));
  g.tail(g.size() - 1) -= ridge * beta.tail(beta.size() - 1);
  return g;
}

Eigen::MatrixXd Information(const Eigen::VectorXd& beta, const Eigen::MatrixXd& z,
                            double ridge) {
  Eigen::VectorXd p = Probabilities(beta, z);
  Eigen::VectorXd w = p.array() * (1.0 - p.array());
  Eigen::MatrixXd info = z.transpose() * w.asDiagonal() * z;
  for (Eigen::Index j = 1; j < info.rows(); ++j) info(j, j) += ridge;
  return info;
}

void CheckInputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw DataError("design matrix and labels differ in length");
  if (y.size() == 0) throw DataError("no rows to fit");
  bool has0 = false, has1 = false;
  for (double v : y) {
    if (v == 0.0) has0 = true;
    else if (v == 1.0) has1 = true;
    else throw DataError("labels must be 0 or 1");
  }
  if (!has0 || !has1) throw DataError("labels contain a single class; logistic fit is undefined");
}

}  // namespace

ScalerParams FitScaler(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
  if (x.rows() < 2) throw DataError("standard scaling needs at least 2 rows");
  if (static_cast<Eigen::Index>(names.size()) != x.cols()) {
    throw DataError("scaler column names do not match the matrix");
  }
  ScalerParams p;
  p.names = names;
  p.mean = x.colwise().mean();
  p.std.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double var = (x.col(j).array() - p.mean[j]).square().mean();
    p.std[j] = std::sqrt(var);
    if (!(p.std[j] > 1e-12 * std::max(1.0, std::abs(p.mean[j])))) {
      throw DataError("column '" + names[j] + "' is constant and cannot be standard-scaled");
    }
  }
  return p;
}

Eigen::MatrixXd ApplyScaler(const ScalerParams& params, const Eigen::MatrixXd& x) {
  return (x.rowwise() - params.mean.transpose()).array().rowwise() /
         params.std.transpose().array();
}

double Objective(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                 const Eigen::VectorXd& y, double ridge) {
  return ZObjective(beta, WithIntercept(x), y, ridge);
}

Eigen::VectorXd Gradient(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& y, double ridge) {
  return ZGradient(beta, WithIntercept(x), y, ridge);
}

double LogLikelihood(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y) {
  return Objective(beta, x, y, 0.0);
}

RegressionFit FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const FitOptions& options) {
  CheckInputs(x, y);
  if (options.tolerance <= 0 || options.max_iter < 1 || options.ridge < 0) {
    throw ConfigError("regression options need tolerance > 0, max_iter >= 1, ridge >= 0");
  }
  const Eigen::MatrixXd z = WithIntercept(x);
  RegressionFit fit;
  fit.beta = Eigen::VectorXd::Zero(z.cols());
  double obj = ZObjective(fit.beta, z, y, options.ridge);
  fit.objective_trace.push_back(obj);

  for (int it = 0; it < options.max_iter; ++it) {
    Eigen::VectorXd g = ZGradient(fit.beta, z, y, options.ridge);
    Eigen::VectorXd step = Information(fit.beta, z, options.ridge).ldlt().solve(g);
    // A small gradient alone can leave beta off by gradient / curvature when
    // the information is small; stop only once the step is small too.
    const bool last = g.lpNorm<Eigen::Infinity>() < options.tolerance &&
                      step.lpNorm<Eigen::Infinity>() < options.tolerance;
    double t = 1.0;
    Eigen::VectorXd candidate;
    double cand_obj = -INFINITY;
    // Near the optimum the Newton gain drops below the rounding error of the
    // summed objective, so ties within that error count as no decrease.
    const double slack = 1e-13 * (1.0 + std::abs(obj));
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      candidate = fit.beta + t * step;
      cand_obj = ZObjective(candidate, z, y, options.ridge);
      if (cand_obj >= obj - slack) break;
    }
    if (!(cand_obj >= obj - slack)) break;
    fit.beta = candidate;
    obj = cand_obj;
    fit.objective_trace.push_back(obj);
    fit.iterations = it + 1;
    if (last) break;
    if (options.ridge == 0.0 && fit.beta.lpNorm<Eigen::Infinity>() > kSeparationBeta) break;
  }

  Eigen::VectorXd g = ZGradient(fit.beta, z, y, options.ridge);
  fit.gradient_norm = g.lpNorm<Eigen::Infinity>();
  fit.converged = fit.gradient_norm < options.tolerance;
  fit.log_likelihood = ZObjective(fit.beta, z, y, 0.0);
  Eigen::MatrixXd cov = Information(fit.beta, z, options.ridge).inverse();
  fit.covariance = 0.5 * (cov + cov.transpose());
  if (options.ridge == 0.0) {
    // Complete separation fits every label exactly; quasi-complete
    // separation leaves the information matrix nearly singular.
    Eigen::VectorXd p = Probabilities(fit.beta, z);
    bool saturated = ((y - p).array().abs() < kSaturated).all();
    bool unbounded = fit.beta.lpNorm<Eigen::Infinity>() > kSeparationBeta ||
                     !(fit.covariance.diagonal().maxCoeff() < kMaxVariance);
    if (saturated || unbounded) {
      throw DataError(
          "labels are (quasi-)perfectly separated by the predictors; the maximum-likelihood "
          "estimate does not exist (set a small regression ridge, e.g. 1e-3)");
    }
  }
  return fit;
}

Eigen::VectorXd PredictProbability(const RegressionFit& fit, const Eigen::MatrixXd& x) {
  return Probabilities(fit.beta, WithIntercept(x));
}

double Accuracy(const RegressionFit& fit, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (y.size() == 0) return 0.0;
  Eigen::VectorXd p = PredictProbability(fit, x);
  int correct = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if ((p[i] >= 0.5) == (y[i] == 1.0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

std::optional<CvResult> CrossValidatedAccuracy(const Eigen::MatrixXd& x,
                                               const Eigen::VectorXd& y, int folds,
                                               std::uint64_t seed,
                                               const FitOptions& options) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  std::mt19937_64 rng(seed);
  std::vector<int> fold_of(y.size());
  for (double cls : {0.0, 1.0}) {
    std::vector<int> members;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] == cls) members.push_back(static_cast<int>(i));
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < members.size(); ++k) fold_of[members[k]] = static_cast<int>(k % folds);
  }
  std::vector<std::string> names(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) names[j] = "x" + std::to_string(j);

  CvResult result;
  long correct = 0, tested = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < static_cast<int>(y.size()); ++i) (fold_of[i] == f ? test : train).push_back(i);
    if (test.empty()) continue;
    Eigen::MatrixXd xtr = x(train, Eigen::all);
    Eigen::VectorXd ytr = y(train);
    try {
      ScalerParams scaler = FitScaler(xtr, names);
      RegressionFit fit = FitLogistic(ApplyScaler(scaler, xtr), ytr, options);
      if (!fit.converged) continue;
      Eigen::MatrixXd xte = ApplyScaler(scaler, x(test, Eigen::all));
      correct += std::lround(Accuracy(fit, xte, y(test)) * static_cast<double>(test.size()));
      tested += static_cast<long>(test.size());
      ++result.folds_used;
    } catch (const DataError&) {
      continue;
    }
  }
  if (result.folds_used == 0) return std::nullopt;
  result.accuracy = static_cast<double>(correct) / static_cast<double>(tested);
  return result;
}

std::string Stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  return "";
}

RegressionSummary WaldSummary(const RegressionFit& fit, const std::vector<std::string>& names) {
  if (!fit.converged) throw DataError("logistic fit did not converge; no inference available");
  if (static_cast<Eigen::Index>(names.size()) + 1 != fit.beta.size()) {
    throw DataError("predictor names do not match the fitted coefficients");
  }
  RegressionSummary s;
  s.log_likelihood = fit.log_likelihood;
  s.iterations = fit.iterations;
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    Coefficient c;
    c.name = j == 0 ? "const" : names[j - 1];
    c.beta = fit.beta[j];
    c.se = std::sqrt(std::max(fit.covariance(j, j), 0.0));
    c.ci_low = c.beta - kZ975 * c.se;
    c.ci_high = c.beta + kZ975 * c.se;
    if (c.se > 0) {
      c.z = c.beta / c.se;
      c.p_value = std::erfc(std::abs(c.z) / std::sqrt(2.0));
    } else {
      c.p_value = c.beta == 0.0 ? 1.0 : 0.0;
    }
    c.stars = Stars(c.p_value);
    s.coefficients.push_back(std::move(c));
  }
  return s;
}

std::string FormatSummary(const RegressionSummary& summary, const std::string& title) {
  std::string out = title + "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-22s %9s %9s %9s %10s  %s\n", "predictor", "beta",
                "[0.025", "0.975]", "pval", "sig");
  out += buf;
  for (const Coefficient& c : summary.coefficients) {
    std::snprintf(buf, sizeof buf, "%-22s %9.3f %9.3f %9.3f %10.3g  %s\n", c.name.c_str(),
                  c.beta, c.ci_low, c.ci_high, c.p_value, c.stars.c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "n = %d  log-likelihood = %.4f  iterations = %d\n",
                summary.n, summary.log_likelihood, summary.iterations);
  out += buf;
  std::snprintf(buf, sizeof buf, "accuracy (in-sample) = %.4f\n", summary.accuracy);
  out += buf;
  if (summary.cv) {
    std::snprintf(buf, sizeof buf, "accuracy (%d-fold cross-validated) = %.4f\n",
                  summary.cv->folds_used, summary.cv->accuracy);
  } else {
    std::snprintf(buf, sizeof buf, "accuracy (cross-validated) = unavailable\n");
  }
  out += buf;
  return out;
}

std::string SummaryJson(const RegressionSummary& summary, const std::string& scope,
                        const ScalerParams& scaler) {
  nlohmann::ordered_json j;
  j["scope"] = scope;
  j["n"] = summary.n;
  j["log_likelihood"] = summary.log_likelihood;
  j["iterations"] = summary.iterations;
  j["accuracy"] = summary.accuracy;
  j["cv_accuracy"] = summary.cv ? nlohmann::ordered_json(summary.cv->accuracy) : nullptr;
  j["cv_folds_used"] = summary.cv ? summary.cv->folds_used : 0;
  j["coefficients"] = nlohmann::ordered_json::array();
  for (const Coefficient& c : summary.coefficients) {
    j["coefficients"].push_back({{"name", c.name},
                                 {"beta", c.beta},
                                 {"se", c.se},
                                 {"ci_low", c.ci_low},
                                 {"ci_high", c.ci_high},
                                 {"z", c.z},
                                 {"p_value", c.p_value},
                                 {"stars", c.stars}});
  }
  nlohmann::ordered_json sc;
  for (std::size_t k = 0; k < scaler.names.size(); ++k) {
    sc[scaler.names[k]] = {{"mean", scaler.mean[k]}, {"std", scaler.std[k]}};
  }
  j["scaler"] = sc;
  return j.dump(2) + "\n";
}

}  // namespace uidthat::regression
