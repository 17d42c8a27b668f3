#ifndef UIDTHAT_LM_EXTERNAL_H_
#define UIDTHAT_LM_EXTERNAL_H_

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "uidthat/lm/language_model.h"
#include "uidthat/lm/sidecar_protocol.h"

namespace uidthat::lm {

// Carries one request line to the sidecar and returns the matching response
// line. Thread-safe; several exchanges may be in flight at once. Transport
// failures throw a retryable ProviderError.
class SidecarTransport {
 public:
  virtual ~SidecarTransport() = default;
  virtual std::string Exchange(const std::string& request_line,
                               const std::string& id) = 0;
  virtual std::string Describe() const = 0;
};

// One POST per request to an HTTP endpoint such as
// "http://127.0.0.1:8765/score". The path defaults to "/".
std::unique_ptr<SidecarTransport> MakeHttpTransport(
    const std::string& endpoint, std::chrono::milliseconds timeout);

// Spawns `command` through /bin/sh and speaks the protocol over its stdin and
// stdout, one line each way. Responses are matched to callers by id, so
// they may arrive in any order.
std::unique_ptr<SidecarTransport> MakeStdioTransport(
    const std::string& command, std::chrono::milliseconds timeout);

struct ExternalConfig {
  int topk = 50;    // entries requested for NextTokenDistribution
  int retries = 2;  // extra attempts after a retryable failure
};

// Client side of the sidecar protocol. The handshake runs on construction;
// a protocol version other than kProtocolVersion is rejected.
class ExternalModel : public LanguageModel {
 public:
  ExternalModel(std::unique_ptr<SidecarTransport> transport,
                ExternalConfig config = {});

  ProviderKind kind() const override { return ProviderKind::kExternal; }
  TokenizerContract tokenizer() const override {
    return TokenizerContract::kSubword;
  }
  std::string Identity() const override;

  // Top-k entries from the sidecar plus one residual bucket (id -1) holding
  // the unreported mass, so the result always sums to one.
  Distribution NextTokenDistribution(
      std::span<const std::string> prefix) const override;
  double ContinuationLogprob(std::span<const std::string> prefix,
                             std::string_view word) const override;
  double NextTokenEntropy(std::span<const std::string> prefix) const override;

  const std::string& model_name() const { return model_; }

  // Id of a sidecar token string in the client-side interning table.
  int TokenId(const std::string& token) const;

 private:
  SidecarResponse Call(SidecarRequest request) const;

  std::unique_ptr<SidecarTransport> transport_;
  ExternalConfig config_;
  std::string model_;
  mutable std::atomic<long> next_id_{0};
  mutable std::mutex vocab_mu_;
  mutable std::unordered_map<std::string, int> vocab_;
};

}  // namespace uidthat::lm

#endif  // UIDTHAT_LM_EXTERNAL_H_
