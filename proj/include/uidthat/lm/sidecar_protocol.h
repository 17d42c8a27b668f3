#ifndef UIDTHAT_LM_SIDECAR_PROTOCOL_H_
#define UIDTHAT_LM_SIDECAR_PROTOCOL_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uidthat::lm {

// Version spoken by this client. The sidecar's handshake must report the same
// number or the client refuses to connect.
inline constexpr int kProtocolVersion = 1;

// One line of the line-delimited JSON protocol, client to sidecar.
//   {"id", "prefix", "continuation": str|null, "want_entropy", "want_topk"}
// A handshake is {"id", "handshake": true}.
struct SidecarRequest {
  std::string id;
  bool handshake = false;
  std::string prefix;
  std::optional<std::string> continuation;
  bool want_entropy = false;
  int want_topk = 0;
};

// Sidecar to client.
//   {"id", "logprob": f|null, "entropy": f|null, "topk": [[tok, p], ...],
//    "subword_count": n}
// or {"id", "error": str}, or for a handshake
//   {"id", "model": str, "protocol_version": n}.
struct SidecarResponse {
  std::string id;
  std::optional<std::string> error;
  std::optional<double> logprob;
  std::optional<double> entropy;
  std::vector<std::pair<std::string, double>> topk;
  int subword_count = 0;
  std::optional<std::string> model;
  std::optional<int> protocol_version;
};

std::string EncodeRequest(const SidecarRequest& request);
std::string EncodeResponse(const SidecarResponse& response);

// Both throw ProviderError (non-retryable) on malformed lines.
SidecarRequest DecodeRequest(std::string_view line);
SidecarResponse DecodeResponse(std::string_view line);

}  // namespace uidthat::lm

#endif  // UIDTHAT_LM_SIDECAR_PROTOCOL_H_
