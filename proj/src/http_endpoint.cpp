#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "stylemark/mt_client.hpp"

namespace stylemark::mt {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw UsageError("endpoint base_url needs a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw UsageError("unsupported scheme in " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  UrlParts parts;
  parts.origin = url.substr(0, path_start);
  parts.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
  return parts;
}

}  // namespace

HttpEndpoint::HttpEndpoint(EndpointConfig config) : config_(std::move(config)) {
  config_.validate();
  split_url(config_.base_url);
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) {
    throw EndpointError(EndpointError::Kind::Auth, "environment variable " + config_.api_key_env + " is not set");
  }
  api_key_ = key;
}

std::string HttpEndpoint::request_body(const std::string& prompt) const {
  return nlohmann::json{{"model", config_.model_name},
                        {"messages", {{{"role", "user"}, {"content", prompt}}}},
                        {"temperature", config_.temperature}}
      .dump();
}

std::string HttpEndpoint::complete(const std::string& prompt) {
  const auto url = split_url(config_.base_url);
  httplib::Client client(url.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
  client.set_connection_timeout(seconds);
  client.set_read_timeout(seconds);
  client.set_write_timeout(seconds);
  client.set_bearer_token_auth(api_key_);
  auto res = client.Post(url.path + "/chat/completions", request_body(prompt), "application/json");
  if (!res) {
    throw EndpointError(EndpointError::Kind::Transient, "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    std::string detail = res->body.substr(0, 300);
    throw EndpointError(classify_status(res->status), "HTTP " + std::to_string(res->status) + ": " + detail);
  }
  return parse_completion(res->body);
}

}  // namespace stylemark::mt
