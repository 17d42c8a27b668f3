#ifndef UIDTHAT_LM_DISTRIBUTION_H_
#define UIDTHAT_LM_DISTRIBUTION_H_

#include <span>
#include <vector>

namespace uidthat::lm {

// Next-token probabilities over (part of) a provider's vocabulary.
struct Distribution {
  std::vector<int> vocab_ids;
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
};

// Non-negative probabilities summing to one within tol.
bool IsNormalized(const Distribution& d, double tol = 1e-9);

// -sum p ln p in nats, with 0 ln 0 = 0.
double Entropy(const Distribution& d);
double Entropy(std::span<const double> probs);

// Numerically stable softmax.
std::vector<double> Softmax(std::span<const double> logits);

// ln(exp(a) + exp(b)) without overflow or underflow.
double LogAddExp(double a, double b);

}  // namespace uidthat::lm

#endif  // UIDTHAT_LM_DISTRIBUTION_H_
