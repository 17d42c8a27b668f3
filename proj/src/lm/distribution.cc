#include "uidthat/lm/distribution.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uidthat::lm {

bool IsNormalized(const Distribution& d, double tol) {
  if (d.vocab_ids.size() != d.probs.size()) return false;
  double sum = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

double Entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

double Entropy(const Distribution& d) { return Entropy(d.probs); }

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (double& p : out) p /= z;
  return out;
}

double LogAddExp(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace uidthat::lm
