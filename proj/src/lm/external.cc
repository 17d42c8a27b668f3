#include "uidthat/lm/external.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uidthat/common/errors.h"
#include "uidthat/corpus/tokens.h"

namespace uidthat::lm {

ExternalModel::ExternalModel(std::unique_ptr<SidecarTransport> transport,
                             ExternalConfig config)
    : transport_(std::move(transport)), config_(config) {
  SidecarRequest hello;
  hello.handshake = true;
  SidecarResponse reply = Call(hello);
  if (!reply.protocol_version) {
    throw ProviderError("sidecar did not answer the handshake", false);
  }
  if (*reply.protocol_version != kProtocolVersion) {
    throw ProviderError("sidecar speaks protocol " +
                            std::to_string(*reply.protocol_version) +
                            ", client requires " +
                            std::to_string(kProtocolVersion),
                        false);
  }
  model_ = reply.model.value_or("unknown");
}

SidecarResponse ExternalModel::Call(SidecarRequest request) const {
  for (int attempt = 0;; ++attempt) {
    request.id = "q" + std::to_string(next_id_.fetch_add(1));
    try {
      SidecarResponse reply =
          DecodeResponse(transport_->Exchange(EncodeRequest(request), request.id));
      if (reply.id != request.id) {
        throw ProviderError("response id " + reply.id + " does not match request " +
                                request.id,
                            false);
      }
      if (reply.error) throw ProviderError("sidecar error: " + *reply.error, false);
      return reply;
    } catch (const ProviderError& e) {
      if (!e.retryable() || attempt >= config_.retries) throw;
    }
  }
}

int ExternalModel::TokenId(const std::string& token) const {
  std::lock_guard<std::mutex> lock(vocab_mu_);
  auto [it, inserted] = vocab_.try_emplace(token, static_cast<int>(vocab_.size()));
  return it->second;
}

Distribution ExternalModel::NextTokenDistribution(
    std::span<const std::string> prefix) const {
  SidecarRequest req;
  req.prefix = corpus::Detokenize(prefix);
  req.want_topk = config_.topk;
  SidecarResponse reply = Call(req);
  Distribution d;
  double mass = 0.0;
  for (const auto& [token, p] : reply.topk) {
    if (p < 0.0 || p > 1.0) throw ProviderError("sidecar returned probability outside [0,1]", false);
    d.vocab_ids.push_back(TokenId(token));
    d.probs.push_back(p);
    mass += p;
  }
  if (mass > 1.0 + 1e-6) throw ProviderError("sidecar top-k mass exceeds 1", false);
  if (mass < 1.0 - 1e-9) {
    d.vocab_ids.push_back(-1);
    d.probs.push_back(1.0 - mass);
  } else if (!d.probs.empty()) {
    for (double& p : d.probs) p /= mass;
  }
  return d;
}

double ExternalModel::ContinuationLogprob(std::span<const std::string> prefix,
                                          std::string_view word) const {
  if (word.empty()) throw DataError("continuation word is empty");
  SidecarRequest req;
  req.prefix = corpus::Detokenize(prefix);
  req.continuation = std::string(word);
  SidecarResponse reply = Call(req);
  if (reply.subword_count <= 0) {
    throw ProviderError("continuation '" + std::string(word) +
                            "' maps to an empty subword sequence",
                        false);
  }
  if (!reply.logprob) throw ProviderError("sidecar omitted logprob", false);
  if (*reply.logprob > 1e-9) throw ProviderError("sidecar returned positive logprob", false);
  return std::min(0.0, *reply.logprob);
}

double ExternalModel::NextTokenEntropy(std::span<const std::string> prefix) const {
  SidecarRequest req;
  req.prefix = corpus::Detokenize(prefix);
  req.want_entropy = true;
  SidecarResponse reply = Call(req);
  if (!reply.entropy) throw ProviderError("sidecar omitted entropy", false);
  if (*reply.entropy < 0.0) throw ProviderError("sidecar returned negative entropy", false);
  return *reply.entropy;
}

std::string ExternalModel::Identity() const {
  std::ostringstream os;
  os << "external(model=" << model_ << ", protocol=" << kProtocolVersion
     << ", transport=" << transport_->Describe() << ", topk=" << config_.topk
     << ")";
  return os.str();
}

}  // namespace uidthat::lm
