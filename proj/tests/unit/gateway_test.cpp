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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"
#include "clinicl/data/descriptor_io.hpp"
#include "clinicl/gateway/gateway.hpp"
#include "clinicl/gateway/mock.hpp"
#include "clinicl/parser/parser.hpp"
#include "fake_server.hpp"
#include "fixtures.hpp"

namespace clinicl {
namespace {

using std::chrono::duration;
using std::chrono::milliseconds;

double millis(std::chrono::steady_clock::duration d) {
  return duration<double, std::milli>(d).count();
}

ChatTranscript tiny_transcript(const std::string& text = "hello") {
  ChatTranscript t;
  t.messages = {{Role::kSystem, "You are terse."}, {Role::kUser, text}};
  return t;
}

GatewayConfig http_config(const std::string& url) {
  GatewayConfig c;
  c.endpoint_url = url;
  c.model_name = "fake-model";
  c.base_backoff_ms = 100;
  c.max_retries = 3;
  c.timeout_ms = 5000;
  c.api_key_env = "CLINICL_TEST_UNSET_KEY";
  return c;
}

Error error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an Error";
  return Error(ErrorCode::kInvalidArgument, "none");
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "clinicl_gateway_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p.string();
}

TEST(Backoff, ExponentialLowerBoundAndJitterRange) {
  for (int attempt = 1; attempt <= 6; ++attempt) {
    const int floor = 100 << (attempt - 1);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const int d = backoff_delay_ms(100, attempt, seed);
      EXPECT_GE(d, floor);
      EXPECT_LT(d, floor + 100);
      EXPECT_EQ(d, backoff_delay_ms(100, attempt, seed));
    }
  }
  EXPECT_EQ(backoff_delay_ms(0, 3, 1), 0);
}

TEST(Config, Validation) {
  GatewayConfig c;
  c.max_parallel = 0;
  EXPECT_THROW(c.validate(), Error);
  c = GatewayConfig{};
  c.temperature = -1;
  EXPECT_THROW(c.validate(), Error);
  c = GatewayConfig{};
  c.max_tokens = 4096;
  EXPECT_THROW(c.validate(), Error);
}

TEST(RequestBody, DeterministicSettings) {
  GatewayConfig c;
  c.model_name = "m";
  const auto body = request_body(tiny_transcript().messages, c);
  EXPECT_EQ(body,
            R"({"model":"m","temperature":0.0,"max_tokens":2048,"messages":[{"content":"You are terse.","role":"system"},{"content":"hello","role":"user"}]})");
}

TEST(Http, HappyPath) {
  testing::FakeChatServer server({200});
  Gateway gw(http_config(server.url()), make_http_backend(http_config(server.url())));
  const auto r = gw.complete(tiny_transcript());
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(r.text, "{\"risk\": 1}");
  ASSERT_TRUE(r.usage.has_value());
  EXPECT_EQ(r.usage->prompt, 10);
  EXPECT_GE(r.latency_seconds, 0.0);
}

TEST(Http, RetriesRateLimitWithBackoff) {
  testing::FakeChatServer server({429, 429, 200});
  const auto cfg = http_config(server.url());
  Gateway gw(cfg, make_http_backend(cfg));
  const auto r = gw.complete(tiny_transcript());
  EXPECT_EQ(r.attempts, 3);
  ASSERT_EQ(r.retry_delays_ms.size(), 2u);
  EXPECT_GE(r.retry_delays_ms[0], 100);
  EXPECT_GE(r.retry_delays_ms[1], 200);
  EXPECT_LE(r.retry_delays_ms[0], r.retry_delays_ms[1]);
  const auto hits = server.hits();
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_GE(millis(hits[1] - hits[0]), 100.0);
  EXPECT_GE(millis(hits[2] - hits[1]), 200.0);
  EXPECT_GE(r.latency_seconds, 0.3);
}

TEST(Http, AuthErrorNotRetried) {
  testing::FakeChatServer server({401});
  const auto cfg = http_config(server.url());
  Gateway gw(cfg, make_http_backend(cfg));
  const auto e = error_of([&] { gw.complete(tiny_transcript()); });
  EXPECT_EQ(e.code(), ErrorCode::kNonRetryable);
  EXPECT_EQ(e.detail(), 401);
  EXPECT_EQ(server.hit_count(), 1u);
}

TEST(Http, ExhaustsOnPersistentServerError) {
  testing::FakeChatServer server({503});
  auto cfg = http_config(server.url());
  cfg.base_backoff_ms = 5;
  cfg.max_retries = 2;
  Gateway gw(cfg, make_http_backend(cfg));
  const auto e = error_of([&] { gw.complete(tiny_transcript()); });
  EXPECT_EQ(e.code(), ErrorCode::kExhaustedRetries);
  EXPECT_EQ(e.detail(), 503);
  EXPECT_EQ(server.hit_count(), 3u);
}

TEST(Http, ConnectionFailureIsRetried) {
  std::string url;
  {
    testing::FakeChatServer gone({200});
    url = gone.url();
  }
  auto cfg = http_config(url);
  cfg.base_backoff_ms = 1;
  cfg.max_retries = 1;
  cfg.timeout_ms = 500;
  Gateway gw(cfg, make_http_backend(cfg));
  const auto e = error_of([&] { gw.complete(tiny_transcript()); });
  EXPECT_EQ(e.code(), ErrorCode::kExhaustedRetries);
  EXPECT_EQ(e.detail(), 0);
}

TEST(Http, MalformedResponse) {
  testing::FakeChatServer server({200}, 0, R"({"choices":[]})");
  const auto cfg = http_config(server.url());
  Gateway gw(cfg, make_http_backend(cfg));
  EXPECT_EQ(error_of([&] { gw.complete(tiny_transcript()); }).code(),
            ErrorCode::kMalformedResponse);
}

TEST(Http, KeyFromEnvironmentOnlyInHeader) {
  testing::FakeChatServer server({200});
  auto cfg = http_config(server.url());
  cfg.api_key_env = "CLINICL_TEST_API_KEY";
  cfg.replay_path = temp_path("key_replay.jsonl");
  ::setenv("CLINICL_TEST_API_KEY", "sk-test-secret-123", 1);
  Gateway gw(cfg, make_http_backend(cfg));
  ::unsetenv("CLINICL_TEST_API_KEY");
  gw.complete(tiny_transcript());
  ASSERT_EQ(server.auth_headers().size(), 1u);
  EXPECT_EQ(server.auth_headers()[0], "Bearer sk-test-secret-123");
  EXPECT_EQ(server.bodies()[0].find("sk-test"), std::string::npos);
  EXPECT_EQ(read_file(cfg.replay_path).find("sk-test"), std::string::npos);
}

TEST(Http, ConcurrencyBound) {
  testing::FakeChatServer server({200}, 60);
  auto cfg = http_config(server.url());
  cfg.max_parallel = 3;
  Gateway gw(cfg, make_http_backend(cfg));
  std::vector<ChatTranscript> batch;
  for (int i = 0; i < 12; ++i) batch.push_back(tiny_transcript("case " + std::to_string(i)));
  const auto out = gw.complete_batch(batch);
  ASSERT_EQ(out.size(), 12u);
  for (const auto& item : out) EXPECT_TRUE(item.result.has_value());
  EXPECT_LE(server.max_in_flight(), 3);
  EXPECT_GE(server.max_in_flight(), 2);
}

TEST(Http, LatencySumMatchesWallClockSerially) {
  testing::FakeChatServer server({200}, 30);
  auto cfg = http_config(server.url());
  cfg.max_parallel = 1;
  Gateway gw(cfg, make_http_backend(cfg));
  std::vector<ChatTranscript> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(tiny_transcript("case " + std::to_string(i)));
  const auto start = std::chrono::steady_clock::now();
  const auto out = gw.complete_batch(batch);
  const double wall = duration<double>(std::chrono::steady_clock::now() - start).count();
  double sum = 0;
  for (const auto& item : out) sum += item.result->latency_seconds;
  EXPECT_NEAR(sum, wall, 0.05 * wall);
}

TEST(Replay, ServesCachedResponsesOffline) {
  testing::FakeChatServer server({200});
  auto cfg = http_config(server.url());
  cfg.replay_path = temp_path("replay.jsonl");
  {
    Gateway gw(cfg, make_http_backend(cfg));
    EXPECT_FALSE(gw.complete(tiny_transcript()).from_cache);
    EXPECT_TRUE(gw.complete(tiny_transcript()).from_cache);
  }
  EXPECT_EQ(server.hit_count(), 1u);
  cfg.replay_only = true;
  cfg.endpoint_url = "http://127.0.0.1:1/unused";
  Gateway offline(cfg, make_http_backend(cfg));
  const auto r = offline.complete(tiny_transcript());
  EXPECT_TRUE(r.from_cache);
  EXPECT_EQ(r.text, "{\"risk\": 1}");
  EXPECT_EQ(error_of([&] { offline.complete(tiny_transcript("new")); }).code(),
            ErrorCode::kConfigError);
}

MockSpec age_rule(const DatasetDescriptor& d) {
  MockSpec m;
  m.specs = d.feature_specs;
  m.weights = {{"age", 1.0}};
  m.bias = -50.0;
  return m;
}

TEST(Mock, AgeRuleExamples) {
  const auto d = testing::mini_heart_descriptor();
  const auto ctx = make_context(d);
  const auto spec = age_rule(d);
  PromptConfig cot;
  cot.reasoning = Reasoning::kCot;
  const auto older = build_prompt({"54", "1", "3", "150", "223"}, {}, ctx, cot);
  const auto r1 = mock_complete(older.messages, spec);
  EXPECT_TRUE(r1.text.ends_with("ANSWER_JSON: {\"risk\": 1}"));
  PromptConfig direct;
  const auto younger = build_prompt({"40", "0", "2", "120", "180"}, {}, ctx, direct);
  EXPECT_EQ(mock_complete(younger.messages, spec).text, "{\"risk\": 0}");
}

TEST(Mock, UnparseableProfile) {
  const auto spec = age_rule(testing::mini_heart_descriptor());
  const auto t = tiny_transcript("### Instructions\nAnswer.");
  EXPECT_EQ(error_of([&] { mock_complete(t.messages, spec); }).code(),
            ErrorCode::kUnparseableProfile);
}

TEST(Mock, RoundTripThroughParserOnRandomProfiles) {
  const auto d = load_descriptor(testing::source_path("configs/heart.json"));
  const auto ds = preprocess(load_csv(d), d);
  MockSpec spec;
  spec.specs = d.feature_specs;
  spec.weights = {{"age", 0.05}, {"cp", 0.8}, {"chol", 0.004}, {"oldpeak", 0.5}, {"thal", 0.2}};
  spec.bias = -7.0;
  const auto ctx = make_context(d);
  Rng rng(31);
  int positives = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t row = rng.below(ds.size());
    const Record rec = record_of(ds, row);
    PromptConfig cfg;
    cfg.comm_style = static_cast<CommStyle>(i % 3);
    cfg.reasoning = i % 2 ? Reasoning::kCot : Reasoning::kDirect;
    const auto t = build_prompt(rec, {}, ctx, cfg);
    const auto values = extract_profile(t.messages, d.feature_specs);
    ASSERT_EQ(values, rec) << comm_style_name(cfg.comm_style);
    const int expected = mock_label(rec, spec);
    positives += expected;
    const auto r = mock_complete(t.messages, spec);
    ASSERT_EQ(parse_risk(r.text).label, expected);
    EXPECT_EQ(mock_complete(t.messages, spec).text, r.text);
  }
  EXPECT_GT(positives, 20);
  EXPECT_LT(positives, 180);
}

TEST(Mock, GatewayUsesSimulatedLatency) {
  const auto d = testing::mini_heart_descriptor();
  GatewayConfig cfg;
  cfg.max_parallel = 2;
  Gateway gw(cfg, make_mock_backend(age_rule(d)));
  const auto t = build_prompt({"54", "1", "3", "150", "223"}, {}, make_context(d), PromptConfig{});
  const auto a = gw.complete(t);
  const auto b = gw.complete(t);
  EXPECT_EQ(a.latency_seconds, b.latency_seconds);
  EXPECT_DOUBLE_EQ(a.latency_seconds, 0.0005 * static_cast<double>(t.token_estimate));
}

TEST(Mock, LiveMultiTurnSendsEachFeature) {
  const auto d = testing::mini_heart_descriptor();
  GatewayConfig cfg;
  cfg.live_multiturn = true;
  Gateway gw(cfg, make_mock_backend(age_rule(d)));
  PromptConfig pc;
  pc.comm_style = CommStyle::kNcMt;
  const auto t = build_prompt({"54", "1", "3", "150", "223"}, {}, make_context(d), pc);
  const auto r = gw.complete(t);
  EXPECT_EQ(r.attempts, 6);  // five acknowledgments plus the answer
  EXPECT_EQ(r.text, "{\"risk\": 1}");
}

}  // namespace
}  // namespace clinicl
