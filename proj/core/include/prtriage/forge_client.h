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

#ifndef PRTRIAGE_FORGE_CLIENT_H_
#define PRTRIAGE_FORGE_CLIENT_H_

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prtriage/agent_registry.h"
#include "prtriage/types.h"

namespace prtriage {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
  // Header names lowercased.
  std::map<std::string, std::string> headers;
};

// GET-only transport seam. Implementations must be safe to call from
// several threads at once.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse Get(const std::string& path_and_query,
                           const HttpHeaders& headers) = 0;
};

// cpp-httplib backed transport rooted at base_url (e.g.
// "https://api.github.com"). Requires a build with OpenSSL for https.
std::unique_ptr<HttpTransport> MakeHttpTransport(std::string base_url);

struct ForgeCredentials {
  std::string token;
  // Reads CB_FORGE_TOKEN; empty token means anonymous access.
  static ForgeCredentials FromEnvironment();
};

struct ForgeClientOptions {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds max_backoff{60000};
  // Shared across all concurrent FetchPullRequest calls on one client.
  int max_in_flight = 4;
  int page_size = 100;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// REST client for GitHub-compatible forges. Assembles a record from the
// pull, files, commits and issue-timeline endpoints.
//
// Errors: 404 -> Error(kNotFound); rate limiting (429, or 403 with an
// exhausted quota / Retry-After) is retried with capped exponential backoff
// and ends in Error(kRateLimited); payloads lacking a required field give
// Error(kMapping) naming the field.
class ForgeClient {
 public:
  ForgeClient(std::shared_ptr<HttpTransport> transport,
              ForgeCredentials credentials, ForgeClientOptions options = {},
              AgentRegistry registry = AgentRegistry::Default(),
              Sleeper sleeper = {});

  PullRequestRecord FetchPullRequest(std::string_view repo, int number);

  std::size_t backoff_count() const { return backoffs_.load(); }
  int max_observed_in_flight() const { return max_in_flight_seen_.load(); }

 private:
  HttpResponse GetWithRetry(const std::string& path);
  std::vector<std::string> GetPages(const std::string& path);

  std::shared_ptr<HttpTransport> transport_;
  ForgeCredentials credentials_;
  ForgeClientOptions options_;
  AgentRegistry registry_;
  Sleeper sleeper_;
  std::counting_semaphore<1024> slots_;
  std::atomic<std::size_t> backoffs_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_seen_{0};
};

// Deterministic mapping from raw payloads (each list endpoint given as its
// JSON array pages) to a record. Exposed for golden-fixture tests.
PullRequestRecord MapForgePayloads(std::string_view repo, int number,
                                   std::string_view pull_json,
                                   std::span<const std::string> file_pages,
                                   std::span<const std::string> commit_pages,
                                   std::span<const std::string> timeline_pages,
                                   const AgentRegistry& registry);

// True when the body contains a closing reference such as "Fixes #12" or
// "resolves owner/repo#3".
bool MentionsClosingIssue(std::string_view body);

}  // namespace prtriage

#endif  // PRTRIAGE_FORGE_CLIENT_H_
