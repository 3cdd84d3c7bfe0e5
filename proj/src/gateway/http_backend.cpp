// Copyright 2026 The clinicl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "httplib.h"

#include <cstdlib>

#include "clinicl/gateway/gateway.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfigError, "endpoint_url needs an http:// or https:// scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kConfigError, "unsupported endpoint scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(const GatewayConfig& config) : endpoint_(split_url(config.endpoint_url)) {
    if (const char* key = std::getenv(config.api_key_env.c_str()); key != nullptr && *key) {
      api_key_ = key;
    }
  }

  AttemptOutcome send(std::span<const Message> messages, const GatewayConfig& config) override {
    // A client per call keeps concurrent sends independent.
    httplib::Client client(endpoint_.origin);
    const auto timeout = std::chrono::milliseconds(config.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const auto res =
        client.Post(endpoint_.path, headers, request_body(messages, config), "application/json");
    AttemptOutcome out;
    if (!res) {
      out.status = 0;
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    if (res->status < 200 || res->status >= 300) return out;
    const auto body = nlohmann::json::parse(res->body, nullptr, false);
    try {
      out.text = body.at("choices").at(0).at("message").at("content").get<std::string>();
      if (body.contains("usage") && body.at("usage").is_object()) {
        const auto& u = body.at("usage");
        out.usage = TokenUsage{u.value("prompt_tokens", 0), u.value("completion_tokens", 0)};
      }
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kMalformedResponse,
                  "response lacks choices[0].message.content", res->status);
    }
    return out;
  }

 private:
  Endpoint endpoint_;
  std::string api_key_;
};

}  // namespace

std::unique_ptr<Backend> make_http_backend(const GatewayConfig& config) {
  return std::make_unique<HttpBackend>(config);
}

}  // namespace clinicl
