#include "uidthat/lm/sidecar_protocol.h"

#include "json.hpp"
#include "uidthat/common/errors.h"

namespace uidthat::lm {

using nlohmann::json;
using nlohmann::ordered_json;

std::string EncodeRequest(const SidecarRequest& r) {
  ordered_json obj;
  obj["id"] = r.id;
  if (r.handshake) {
    obj["handshake"] = true;
    return obj.dump();
  }
  obj["prefix"] = r.prefix;
  obj["continuation"] = r.continuation ? ordered_json(*r.continuation) : nullptr;
  obj["want_entropy"] = r.want_entropy;
  obj["want_topk"] = r.want_topk;
  return obj.dump();
}

std::string EncodeResponse(const SidecarResponse& r) {
  ordered_json obj;
  obj["id"] = r.id;
  if (r.error) {
    obj["error"] = *r.error;
    return obj.dump();
  }
  if (r.protocol_version) {
    obj["model"] = r.model.value_or("");
    obj["protocol_version"] = *r.protocol_version;
    return obj.dump();
  }
  obj["logprob"] = r.logprob ? ordered_json(*r.logprob) : nullptr;
  obj["entropy"] = r.entropy ? ordered_json(*r.entropy) : nullptr;
  ordered_json topk = ordered_json::array();
  for (const auto& [token, p] : r.topk) topk.push_back({token, p});
  obj["topk"] = std::move(topk);
  obj["subword_count"] = r.subword_count;
  return obj.dump();
}

SidecarRequest DecodeRequest(std::string_view line) {
  try {
    json obj = json::parse(line);
    SidecarRequest r;
    r.id = obj.at("id").get<std::string>();
    r.handshake = obj.value("handshake", false);
    if (r.handshake) return r;
    r.prefix = obj.at("prefix").get<std::string>();
    if (obj.contains("continuation") && !obj["continuation"].is_null()) {
      r.continuation = obj["continuation"].get<std::string>();
    }
    r.want_entropy = obj.value("want_entropy", false);
    r.want_topk = obj.value("want_topk", 0);
    return r;
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed sidecar request: ") + e.what(),
                        false);
  }
}

SidecarResponse DecodeResponse(std::string_view line) {
  try {
    json obj = json::parse(line);
    SidecarResponse r;
    r.id = obj.at("id").get<std::string>();
    if (obj.contains("error")) {
      r.error = obj["error"].get<std::string>();
      return r;
    }
    if (obj.contains("protocol_version")) {
      r.protocol_version = obj["protocol_version"].get<int>();
      r.model = obj.value("model", "");
      return r;
    }
    if (!obj.at("logprob").is_null()) r.logprob = obj["logprob"].get<double>();
    if (!obj.at("entropy").is_null()) r.entropy = obj["entropy"].get<double>();
    for (const auto& pair : obj.at("topk")) {
      r.topk.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
    }
    r.subword_count = obj.at("subword_count").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed sidecar response: ") + e.what(),
                        false);
  }
}

}  // namespace uidthat::lm
