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

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "clinicl/common/error.hpp"
#include "clinicl/prompt/prompt.hpp"

namespace clinicl {

inline constexpr int kMaxCompletionTokens = 2048;

struct GatewayConfig {
  std::string endpoint_url;  // e.g. https://host/v1/chat/completions
  std::string model_name;
  double temperature = 0.0;
  int max_retries = 5;
  int base_backoff_ms = 500;
  int max_parallel = 4;
  int timeout_ms = 60000;
  int max_tokens = kMaxCompletionTokens;
  // Name of the environment variable holding the API key. The key itself is
  // never stored in configs, flags or logs.
  std::string api_key_env = "OPENAI_API_KEY";
  std::uint64_t jitter_seed = 0;
  // Line-delimited JSON cache of request/response pairs; empty disables it.
  std::string replay_path;
  // Fail on cache misses instead of calling the backend.
  bool replay_only = false;
  // Send NC_MT feature turns one at a time and keep the model's real replies
  // instead of the fabricated acknowledgments.
  bool live_multiturn = false;

  // Throws kConfigError for out-of-range values.
  void validate() const;
};

struct TokenUsage {
  int prompt = 0;
  int completion = 0;
};

struct CompletionResult {
  std::string text;
  double latency_seconds = 0.0;
  int attempts = 1;
  std::optional<TokenUsage> usage;
  bool from_cache = false;
  std::vector<int> retry_delays_ms;  // one entry per retry
};

// One attempt's outcome. Status 0 means the request never produced an HTTP
// response (connection failure or timeout).
struct AttemptOutcome {
  int status = 0;
  std::string text;
  std::optional<TokenUsage> usage;
  std::string error;
  // Backends that simulate time report it here instead of being timed.
  std::optional<double> simulated_seconds;
};

class Backend {
 public:
  virtual ~Backend() = default;
  // Throws kMalformedResponse when a 2xx body cannot be interpreted.
  virtual AttemptOutcome send(std::span<const Message> messages, const GatewayConfig& config) = 0;
};

// Chat-completions over HTTP(S). Reads the key from config.api_key_env at
// construction; no Authorization header is sent when it is unset.
std::unique_ptr<Backend> make_http_backend(const GatewayConfig& config);

// Request body sent to the endpoint (without credentials).
std::string request_body(std::span<const Message> messages, const GatewayConfig& config);

bool is_retryable_status(int status);

// Delay before retry number `attempt` (1-based): base * 2^(attempt-1) plus a
// seeded jitter in [0, base).
int backoff_delay_ms(int base_ms, int attempt, std::uint64_t seed);

class ReplayLog {
 public:
  explicit ReplayLog(std::string path);

  std::optional<CompletionResult> lookup(const std::string& key) const;
  void append(const std::string& key, const std::string& request, const CompletionResult& result);
  std::size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, CompletionResult> entries_;
};

// Cache key: SHA-256 of the request body.
std::string replay_key(std::span<const Message> messages, const GatewayConfig& config);

struct BatchItem {
  std::optional<CompletionResult> result;
  std::optional<Error> error;
};

class Gateway {
 public:
  Gateway(GatewayConfig config, std::unique_ptr<Backend> backend);

  // Retries transient failures. Throws kExhaustedRetries or kNonRetryable
  // with the last HTTP status as the error detail.
  CompletionResult complete(const ChatTranscript& transcript);

  // At most max_parallel requests in flight; results follow input order.
  std::vector<BatchItem> complete_batch(std::span<const ChatTranscript> transcripts);

  const GatewayConfig& config() const { return config_; }

 private:
  CompletionResult complete_messages(std::span<const Message> messages);
  CompletionResult complete_live(const ChatTranscript& transcript);

  GatewayConfig config_;
  std::unique_ptr<Backend> backend_;
  std::unique_ptr<ReplayLog> replay_;
  std::counting_semaphore<1024> slots_;
};

}  // namespace clinicl
