// Copyright 2026 The prtriage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "prtriage/errors.h"
#include "prtriage/forge_client.h"
#include "prtriage/timeutil.h"

namespace prtriage {
namespace {

std::string Fixture(const std::string& name) {
  std::ifstream in(std::string(PRTRIAGE_TEST_DATA_DIR) + "/forge/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Serves scripted responses per path; the last response for a path repeats.
class ScriptedTransport : public HttpTransport {
 public:
  void Add(const std::string& path, HttpResponse resp) {
    std::lock_guard<std::mutex> lock(mu_);
    script_[path].push_back(std::move(resp));
  }
  HttpResponse Get(const std::string& path, const HttpHeaders& headers) override {
    std::lock_guard<std::mutex> lock(mu_);
    requests_.push_back(path);
    last_headers_ = headers;
    auto it = script_.find(path);
    if (it == script_.end()) return {404, "{}", {}};
    if (it->second.size() > 1) {
      HttpResponse r = it->second.front();
      it->second.pop_front();
      return r;
    }
    return it->second.front();
  }
  std::vector<std::string> requests() const { return requests_; }
  HttpHeaders last_headers() const { return last_headers_; }

 private:
  std::mutex mu_;
  std::map<std::string, std::deque<HttpResponse>> script_;
  std::vector<std::string> requests_;
  HttpHeaders last_headers_;
};

const std::string kBase = "/repos/acme/uploader";

std::shared_ptr<ScriptedTransport> FixtureTransport() {
  auto t = std::make_shared<ScriptedTransport>();
  t->Add(kBase + "/pulls/42", {200, Fixture("pull.json"), {}});
  t->Add(kBase + "/pulls/42/files?per_page=100&page=1", {200, Fixture("files.json"), {}});
  t->Add(kBase + "/pulls/42/commits?per_page=100&page=1",
         {200, Fixture("commits.json"), {}});
  t->Add(kBase + "/issues/42/timeline?per_page=100&page=1",
         {200, Fixture("timeline.json"), {}});
  return t;
}

ForgeClient MakeClient(std::shared_ptr<HttpTransport> t, ForgeClientOptions o = {}) {
  return ForgeClient(std::move(t), ForgeCredentials{"tok"}, o,
                     AgentRegistry::Default(), [](std::chrono::milliseconds) {});
}

void ExpectGoldenRecord(const PullRequestRecord& r) {
  EXPECT_EQ(r.id, "acme/uploader#42");
  EXPECT_EQ(r.repo_id, "acme/uploader");
  EXPECT_EQ(r.agent_name, "Devin");
  EXPECT_EQ(r.author_kind, AuthorKind::kGenerativeAgent);
  EXPECT_EQ(r.state, PrState::kRejected);
  EXPECT_FALSE(r.merged_at.has_value());
  EXPECT_EQ(FormatIso8601(r.created_at), "2025-02-03T10:00:00Z");
  EXPECT_EQ(FormatIso8601(*r.closed_at), "2025-02-20T08:30:00Z");
  EXPECT_EQ(r.title, "Add retry to uploader");
  EXPECT_TRUE(r.linked_issue);
  EXPECT_EQ(r.primary_language, "Go");
  EXPECT_EQ(r.total_additions, 130);
  EXPECT_EQ(r.total_deletions, 12);
  ASSERT_EQ(r.files.size(), 3u);
  EXPECT_EQ(r.files[1], (FileChange{"upload/client_test.go", 38, 0}));
  EXPECT_FALSE(r.files_truncated);
  ASSERT_EQ(r.commits.size(), 2u);
  EXPECT_EQ(r.commits[0].sha, "a1");  // sorted by committer date
  EXPECT_EQ(FormatIso8601(r.commits[1].timestamp), "2025-02-04T12:00:00Z");
  ASSERT_EQ(r.timeline.size(), 3u);  // "labeled" dropped
  EXPECT_EQ(r.timeline[0].author_kind, ActorKind::kBot);
  EXPECT_EQ(r.timeline[1].kind, EventKind::kComment);
  EXPECT_EQ(r.timeline[2].kind, EventKind::kReview);
  EXPECT_EQ(FormatIso8601(r.timeline[2].timestamp), "2025-02-05T15:00:00Z");
  EXPECT_EQ(r.ci_status, CiStatus::kNone);
}

TEST(ForgeMappingTest, GoldenFixture) {
  const std::vector<std::string> files{Fixture("files.json")};
  const std::vector<std::string> commits{Fixture("commits.json")};
  const std::vector<std::string> timeline{Fixture("timeline.json")};
  ExpectGoldenRecord(MapForgePayloads("acme/uploader", 42, Fixture("pull.json"),
                                      files, commits, timeline,
                                      AgentRegistry::Default()));
}

TEST(ForgeMappingTest, MissingFieldNamed) {
  std::string pull = Fixture("pull.json");
  const std::string key = "\"additions\": 130,";
  pull.erase(pull.find(key), key.size());
  const std::vector<std::string> empty{"[]"};
  try {
    MapForgePayloads("acme/uploader", 42, pull, empty, empty, empty,
                     AgentRegistry::Default());
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMapping);
    EXPECT_NE(std::string(e.what()).find("additions"), std::string::npos) << e.what();
  }
}

TEST(ForgeMappingTest, CappedFileListingMarksTruncated) {
  const std::vector<std::string> files{
      R"([{"filename": "a.go", "additions": 1, "deletions": 0}])"};
  const std::vector<std::string> empty{"[]"};
  const auto r = MapForgePayloads("acme/uploader", 42, Fixture("pull.json"), files,
                                  empty, empty, AgentRegistry::Default());
  EXPECT_TRUE(r.files.empty());
  EXPECT_TRUE(r.files_truncated);
}

TEST(ForgeMappingTest, ClosingKeywords) {
  EXPECT_TRUE(MentionsClosingIssue("Fixes #12"));
  EXPECT_TRUE(MentionsClosingIssue("this resolves acme/app#3."));
  EXPECT_TRUE(MentionsClosingIssue("Closed #9"));
  EXPECT_FALSE(MentionsClosingIssue("see #12"));
  EXPECT_FALSE(MentionsClosingIssue("prefixes #12"));
  EXPECT_FALSE(MentionsClosingIssue(""));
}

TEST(ForgeClientTest, FetchMatchesFixtureAndSendsToken) {
  auto t = FixtureTransport();
  ForgeClient client = MakeClient(t);
  ExpectGoldenRecord(client.FetchPullRequest("acme/uploader", 42));
  EXPECT_EQ(client.backoff_count(), 0u);
  bool auth = false;
  for (const auto& [k, v] : t->last_headers()) auth = auth || (k == "Authorization" && v == "Bearer tok");
  EXPECT_TRUE(auth);
}

TEST(ForgeClientTest, NotFound) {
  ForgeClient client = MakeClient(std::make_shared<ScriptedTransport>());
  try {
    client.FetchPullRequest("acme/uploader", 7);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
  }
}

TEST(ForgeClientTest, RateLimitThenSuccess) {
  auto t = FixtureTransport();
  auto scripted = std::make_shared<ScriptedTransport>();
  scripted->Add(kBase + "/pulls/42",
                {403, "{}", {{"x-ratelimit-remaining", "0"}}});
  scripted->Add(kBase + "/pulls/42", {429, "{}", {{"retry-after", "1"}}});
  scripted->Add(kBase + "/pulls/42", {200, Fixture("pull.json"), {}});
  scripted->Add(kBase + "/pulls/42/files?per_page=100&page=1", {200, Fixture("files.json"), {}});
  scripted->Add(kBase + "/pulls/42/commits?per_page=100&page=1",
                {200, Fixture("commits.json"), {}});
  scripted->Add(kBase + "/issues/42/timeline?per_page=100&page=1",
                {200, Fixture("timeline.json"), {}});
  std::vector<std::chrono::milliseconds> waits;
  ForgeClientOptions o;
  o.initial_backoff = std::chrono::milliseconds(100);
  ForgeClient client(scripted, {}, o, AgentRegistry::Default(),
                     [&](std::chrono::milliseconds d) { waits.push_back(d); });
  ExpectGoldenRecord(client.FetchPullRequest("acme/uploader", 42));
  EXPECT_EQ(client.backoff_count(), 2u);
  ASSERT_EQ(waits.size(), 2u);
  EXPECT_EQ(waits[0], std::chrono::milliseconds(100));
  EXPECT_EQ(waits[1], std::chrono::milliseconds(1000));  // Retry-After wins
}

TEST(ForgeClientTest, PersistentRateLimitGivesUp) {
  auto t = std::make_shared<ScriptedTransport>();
  t->Add(kBase + "/pulls/42", {429, "{}", {}});
  ForgeClientOptions o;
  o.max_attempts = 3;
  ForgeClient client = MakeClient(t, o);
  try {
    client.FetchPullRequest("acme/uploader", 42);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRateLimited);
  }
  EXPECT_EQ(client.backoff_count(), 2u);
  EXPECT_EQ(t->requests().size(), 3u);
}

TEST(ForgeClientTest, PlainForbiddenIsForgeError) {
  auto t = std::make_shared<ScriptedTransport>();
  t->Add(kBase + "/pulls/42", {403, "{}", {}});
  ForgeClient client = MakeClient(t);
  try {
    client.FetchPullRequest("acme/uploader", 42);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kForge);
  }
}

TEST(ForgeClientTest, PaginatesUntilShortPage) {
  auto t = FixtureTransport();
  ForgeClientOptions o;
  o.page_size = 2;
  t->Add(kBase + "/pulls/42/files?per_page=2&page=1",
         {200,
          R"([{"filename": "upload/client.go", "additions": 90, "deletions": 10},
              {"filename": "upload/client_test.go", "additions": 38, "deletions": 0}])",
          {}});
  t->Add(kBase + "/pulls/42/files?per_page=2&page=2",
         {200, R"([{"filename": ".github/workflows/ci.yml", "additions": 2, "deletions": 2}])",
          {}});
  t->Add(kBase + "/pulls/42/commits?per_page=2&page=1", {200, Fixture("commits.json"), {}});
  t->Add(kBase + "/pulls/42/commits?per_page=2&page=2", {200, "[]", {}});
  t->Add(kBase + "/issues/42/timeline?per_page=2&page=1",
         {200, Fixture("timeline.json"), {}});
  t->Add(kBase + "/issues/42/timeline?per_page=2&page=2", {200, "[]", {}});
  ForgeClient client = MakeClient(t, o);
  ExpectGoldenRecord(client.FetchPullRequest("acme/uploader", 42));
}

// Slow transport so concurrent fetches overlap; the client must cap
// in-flight requests at the configured limit.
class SlowTransport : public ScriptedTransport {
 public:
  HttpResponse Get(const std::string& path, const HttpHeaders& headers) override {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    return ScriptedTransport::Get(path, headers);
  }
};

TEST(ForgeClientTest, InFlightBounded) {
  auto t = std::make_shared<SlowTransport>();
  t->Add(kBase + "/pulls/42", {200, Fixture("pull.json"), {}});
  t->Add(kBase + "/pulls/42/files?per_page=100&page=1", {200, Fixture("files.json"), {}});
  t->Add(kBase + "/pulls/42/commits?per_page=100&page=1", {200, Fixture("commits.json"), {}});
  t->Add(kBase + "/issues/42/timeline?per_page=100&page=1",
         {200, Fixture("timeline.json"), {}});
  ForgeClientOptions o;
  o.max_in_flight = 2;
  ForgeClient client = MakeClient(t, o);
  std::vector<std::jthread> threads;
  for (int i = 0; i < 6; ++i) {
    threads.emplace_back([&] { client.FetchPullRequest("acme/uploader", 42); });
  }
  threads.clear();
  EXPECT_LE(client.max_observed_in_flight(), 2);
  EXPECT_GE(client.max_observed_in_flight(), 1);
}

}  // namespace
}  // namespace prtriage
