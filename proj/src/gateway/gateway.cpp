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

#include "clinicl/gateway/gateway.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"
#include "json.hpp"

namespace clinicl {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

json usage_json(const std::optional<TokenUsage>& usage) {
  if (!usage) return nullptr;
  return {{"prompt_tokens", usage->prompt}, {"completion_tokens", usage->completion}};
}

}  // namespace

void GatewayConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfigError, "gateway: " + what);
  };
  if (!(temperature >= 0)) fail("temperature must be >= 0");
  if (max_retries < 0) fail("max_retries must be >= 0");
  if (base_backoff_ms < 0) fail("base_backoff_ms must be >= 0");
  if (max_parallel < 1 || max_parallel > 1024) fail("max_parallel must lie in [1, 1024]");
  if (timeout_ms <= 0) fail("timeout_ms must be positive");
  if (max_tokens < 1 || max_tokens > kMaxCompletionTokens) fail("max_tokens must lie in [1, 2048]");
}

std::string request_body(std::span<const Message> messages, const GatewayConfig& config) {
  json msgs = json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", std::string(role_name(m.role))}, {"content", m.content}});
  }
  nlohmann::ordered_json body;
  body["model"] = config.model_name;
  body["temperature"] = config.temperature;
  body["max_tokens"] = config.max_tokens;
  body["messages"] = std::move(msgs);
  return body.dump();
}

bool is_retryable_status(int status) { return status == 0 || status == 429 || status >= 500; }

int backoff_delay_ms(int base_ms, int attempt, std::uint64_t seed) {
  if (base_ms <= 0) return 0;
  const double exponential = std::ldexp(static_cast<double>(base_ms), attempt - 1);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
  const auto jitter = static_cast<double>(rng.below(static_cast<std::uint64_t>(base_ms)));
  return static_cast<int>(std::min(exponential + jitter, 3.6e6));
}

std::string replay_key(std::span<const Message> messages, const GatewayConfig& config) {
  return sha256_hex(request_body(messages, config));
}

ReplayLog::ReplayLog(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("key") || !j.contains("response")) {
      throw Error(ErrorCode::kConfigError,
                  "replay log " + path_ + " line " + std::to_string(line_no) + " is malformed");
    }
    CompletionResult r;
    const auto& resp = j.at("response");
    r.text = resp.at("text").get<std::string>();
    r.latency_seconds = resp.value("latency_seconds", 0.0);
    r.attempts = resp.value("attempts", 1);
    if (resp.contains("usage") && resp.at("usage").is_object()) {
      r.usage = TokenUsage{resp.at("usage").at("prompt_tokens").get<int>(),
                           resp.at("usage").at("completion_tokens").get<int>()};
    }
    r.from_cache = true;
    entries_[j.at("key").get<std::string>()] = std::move(r);
  }
}

std::optional<CompletionResult> ReplayLog::lookup(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ReplayLog::append(const std::string& key, const std::string& request,
                       const CompletionResult& result) {
  nlohmann::ordered_json j;
  j["key"] = key;
  j["request"] = json::parse(request);
  j["response"] = {{"text", result.text},
                   {"latency_seconds", result.latency_seconds},
                   {"attempts", result.attempts},
                   {"usage", usage_json(result.usage)}};
  std::lock_guard lock(mu_);
  if (entries_.count(key)) return;
  const std::filesystem::path p(path_);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << j.dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to replay log " + path_);
  CompletionResult cached = result;
  cached.from_cache = true;
  entries_[key] = std::move(cached);
}

std::size_t ReplayLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

Gateway::Gateway(GatewayConfig config, std::unique_ptr<Backend> backend)
    : config_(std::move(config)), backend_(std::move(backend)), slots_(config_.max_parallel) {
  config_.validate();
  if (!config_.replay_path.empty()) replay_ = std::make_unique<ReplayLog>(config_.replay_path);
  if (config_.replay_only && !replay_) {
    throw Error(ErrorCode::kConfigError, "replay_only needs a replay_path");
  }
}

CompletionResult Gateway::complete(const ChatTranscript& transcript) {
  if (transcript.messages.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot send an empty transcript");
  }
  if (config_.live_multiturn) return complete_live(transcript);
  return complete_messages(transcript.messages);
}

CompletionResult Gateway::complete_messages(std::span<const Message> messages) {
  const std::string body = request_body(messages, config_);
  const std::string key = sha256_hex(body);
  if (replay_) {
    if (auto hit = replay_->lookup(key)) return *hit;
    if (config_.replay_only) {
      throw Error(ErrorCode::kConfigError, "replay log has no entry for request " + key);
    }
  }
  CompletionResult result;
  const std::uint64_t jitter_seed = derive_seed(config_.jitter_seed, key);
  const auto start = Clock::now();
  double simulated = 0.0;
  bool all_simulated = true;
  int last_status = 0;
  std::string last_error;
  for (int attempt = 1;; ++attempt) {
    AttemptOutcome outcome;
    {
      slots_.acquire();
      struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
      } release{slots_};
      outcome = backend_->send(messages, config_);
    }
    result.attempts = attempt;
    if (outcome.simulated_seconds) {
      simulated += *outcome.simulated_seconds;
    } else {
      all_simulated = false;
    }
    last_status = outcome.status;
    last_error = outcome.error;
    if (outcome.status >= 200 && outcome.status < 300) {
      result.text = std::move(outcome.text);
      result.usage = outcome.usage;
      break;
    }
    if (!is_retryable_status(outcome.status)) {
      throw Error(ErrorCode::kNonRetryable,
                  "endpoint returned HTTP " + std::to_string(outcome.status), outcome.status);
    }
    if (attempt > config_.max_retries) {
      throw Error(ErrorCode::kExhaustedRetries,
                  "gave up after " + std::to_string(attempt) + " attempts (last status " +
                      std::to_string(last_status) + (last_error.empty() ? "" : ", " + last_error) +
                      ")",
                  last_status);
    }
    const int delay = backoff_delay_ms(config_.base_backoff_ms, attempt, jitter_seed);
    result.retry_delays_ms.push_back(delay);
    if (all_simulated) {
      simulated += delay / 1000.0;
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
  }
  result.latency_seconds = all_simulated
                               ? simulated
                               : std::chrono::duration<double>(Clock::now() - start).count();
  if (replay_) replay_->append(key, body, result);
  return result;
}

CompletionResult Gateway::complete_live(const ChatTranscript& transcript) {
  // Replace each fabricated acknowledgment of the target profile by a real
  // reply, sending the conversation so far.
  std::vector<Message> conversation;
  CompletionResult total;
  total.attempts = 0;
  bool in_profile = false;
  for (const auto& m : transcript.messages) {
    if (m.role == Role::kUser && m.content.rfind(kProfileSentinel, 0) == 0) in_profile = true;
    if (in_profile && m.role == Role::kAssistant && m.content == kAcknowledgment) {
      auto reply = complete_messages(conversation);
      total.attempts += reply.attempts;
      total.latency_seconds += reply.latency_seconds;
      conversation.push_back({Role::kAssistant, reply.text});
      continue;
    }
    conversation.push_back(m);
  }
  auto final_reply = complete_messages(conversation);
  final_reply.attempts += total.attempts;
  final_reply.latency_seconds += total.latency_seconds;
  return final_reply;
}

std::vector<BatchItem> Gateway::complete_batch(std::span<const ChatTranscript> transcripts) {
  std::vector<BatchItem> out(transcripts.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < transcripts.size(); i = next++) {
      try {
        out[i].result = complete(transcripts[i]);
      } catch (const Error& e) {
        out[i].error = e;
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config_.max_parallel),
                                             transcripts.size());
  if (workers <= 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace clinicl
