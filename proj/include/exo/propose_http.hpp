#pragma once
// Live chat-completion transport for the proposal service backend. Kept out
// of propose.hpp so that test and library translation units never pull in
// the HTTP and TLS stack; only the CLI includes this header and wires
// make_llm_transport into a Proposer.

#include <optional>
#include <string>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "exo/propose.hpp"

namespace exo {

// One blocking request/response call. Returns the assistant message text,
// or nullopt on transport, auth, or schema trouble.
inline std::optional<std::string> chat_completion(const LlmConfig& cfg,
                                                  const std::string& prompt) {
  if (cfg.url.empty() || cfg.model.empty()) return std::nullopt;
  size_t scheme = cfg.url.find("://");
  if (scheme == std::string::npos) return std::nullopt;
  size_t slash = cfg.url.find('/', scheme + 3);
  std::string base =
      slash == std::string::npos ? cfg.url : cfg.url.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : cfg.url.substr(slash);

  httplib::Client cli(base);
  cli.set_connection_timeout(cfg.timeout_sec);
  cli.set_read_timeout(cfg.timeout_sec);
  httplib::Headers headers;
  if (!cfg.api_key.empty())
    headers.emplace("Authorization", "Bearer " + cfg.api_key);

  nlohmann::json body{
      {"model", cfg.model},
      {"messages",
       nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", cfg.temperature}};
  auto res = cli.Post(path, headers, body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    return j.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

inline std::function<std::optional<std::string>(const std::string&)>
make_llm_transport(const LlmConfig& cfg) {
  return [cfg](const std::string& prompt) { return chat_completion(cfg, prompt); };
}

}  // namespace exo
