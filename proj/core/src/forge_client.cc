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

#include "prtriage/forge_client.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "prtriage/errors.h"

namespace prtriage {

namespace {

using nlohmann::json;

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::string base_url)
      : base_url_(std::move(base_url)) {}

  HttpResponse Get(const std::string& path_and_query,
                   const HttpHeaders& headers) override {
    // httplib::Client is not safe for concurrent use; one per request.
    httplib::Client client(base_url_);
    client.set_follow_location(true);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto result = client.Get(path_and_query, h);
    if (!result) {
      throw Error(ErrorKind::kForge,
                  fmt::format("GET {} failed: {}", path_and_query,
                              httplib::to_string(result.error())));
    }
    HttpResponse out;
    out.status = result->status;
    out.body = result->body;
    for (const auto& [k, v] : result->headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
      });
      out.headers[key] = v;
    }
    return out;
  }

 private:
  std::string base_url_;
};

// Navigates a dotted path and reports the full path when absent.
const json& Require(const json& root, std::string_view dotted) {
  const json* cur = &root;
  size_t start = 0;
  while (start <= dotted.size()) {
    const size_t dot = dotted.find('.', start);
    const std::string key(dotted.substr(
        start, dot == std::string_view::npos ? std::string_view::npos
                                             : dot - start));
    if (!cur->is_object() || !cur->contains(key)) {
      throw Error(ErrorKind::kMapping,
                  fmt::format("forge payload missing field '{}'", dotted));
    }
    cur = &(*cur)[key];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return *cur;
}

std::string RequireString(const json& root, std::string_view dotted) {
  const json& v = Require(root, dotted);
  if (!v.is_string()) {
    throw Error(ErrorKind::kMapping,
                fmt::format("forge field '{}' is not a string", dotted));
  }
  return v.get<std::string>();
}

std::int64_t RequireInt(const json& root, std::string_view dotted) {
  const json& v = Require(root, dotted);
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::kMapping,
                fmt::format("forge field '{}' is not an integer", dotted));
  }
  return v.get<std::int64_t>();
}

std::optional<Timestamp> NullableTime(const json& root, const char* key) {
  const json& v = Require(root, key);
  if (v.is_null()) return std::nullopt;
  return ParseIso8601(v.get<std::string>());
}

json ParseJson(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kMapping,
                fmt::format("{} payload is not JSON: {}", what, e.what()));
  }
}

std::vector<json> Items(std::span<const std::string> pages,
                        std::string_view what) {
  std::vector<json> out;
  for (const auto& page : pages) {
    json arr = ParseJson(page, what);
    if (!arr.is_array()) {
      throw Error(ErrorKind::kMapping,
                  fmt::format("{} payload is not an array", what));
    }
    for (auto& item : arr) out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

std::unique_ptr<HttpTransport> MakeHttpTransport(std::string base_url) {
  return std::make_unique<HttplibTransport>(std::move(base_url));
}

ForgeCredentials ForgeCredentials::FromEnvironment() {
  const char* token = std::getenv("CB_FORGE_TOKEN");
  return ForgeCredentials{token ? token : ""};
}

bool MentionsClosingIssue(std::string_view body) {
  static const std::regex kClosing(
      R"((^|[^A-Za-z0-9_])(close[sd]?|fix(e[sd])?|resolve[sd]?)\s*:?\s+([A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+)?#[0-9]+)",
      std::regex::ECMAScript | std::regex::icase);
  return std::regex_search(body.begin(), body.end(), kClosing);
}

PullRequestRecord MapForgePayloads(std::string_view repo, int number,
                                   std::string_view pull_json,
                                   std::span<const std::string> file_pages,
                                   std::span<const std::string> commit_pages,
                                   std::span<const std::string> timeline_pages,
                                   const AgentRegistry& registry) {
  const json pull = ParseJson(pull_json, "pull");
  PullRequestRecord r;
  r.id = fmt::format("{}#{}", repo, number);
  r.repo_id = std::string(repo);
  const std::string login = RequireString(pull, "user.login");
  r.author_kind =
      ClassifyAuthor(login, RequireString(pull, "user.type"), registry);
  r.agent_name = CanonicalAgentName(login, registry);
  r.created_at = ParseIso8601(RequireString(pull, "created_at"));
  r.merged_at = NullableTime(pull, "merged_at");
  r.closed_at = NullableTime(pull, "closed_at");
  const std::string state = RequireString(pull, "state");
  if (r.merged_at) {
    r.state = PrState::kMerged;
  } else if (state == "closed") {
    r.state = PrState::kRejected;
  } else {
    r.state = PrState::kOpen;
    r.closed_at.reset();
  }
  r.title = RequireString(pull, "title");
  const json& body = Require(pull, "body");
  r.body = body.is_string() ? body.get<std::string>() : "";
  r.total_additions = RequireInt(pull, "additions");
  r.total_deletions = RequireInt(pull, "deletions");
  const json& language = Require(pull, "base.repo.language");
  r.primary_language = language.is_string() ? language.get<std::string>() : "";
  r.linked_issue = MentionsClosingIssue(r.body);
  r.ci_status = CiStatus::kNone;

  for (const json& f : Items(file_pages, "files")) {
    r.files.push_back({RequireString(f, "filename"), RequireInt(f, "additions"),
                       RequireInt(f, "deletions")});
  }
  std::int64_t add = 0;
  std::int64_t del = 0;
  for (const auto& f : r.files) {
    add += f.additions;
    del += f.deletions;
  }
  if (r.files.empty() || add != r.total_additions ||
      del != r.total_deletions) {
    // The files endpoint caps its listing; totals stay authoritative.
    r.files.clear();
    r.files_truncated = r.total_changes() > 0;
  }

  for (const json& c : Items(commit_pages, "commits")) {
    const json& commit = Require(c, "commit");
    std::string date;
    if (commit.contains("committer") && commit["committer"].is_object()) {
      date = RequireString(commit, "committer.date");
    } else {
      date = RequireString(commit, "author.date");
    }
    r.commits.push_back({ParseIso8601(date), RequireString(c, "sha")});
  }

  for (const json& e : Items(timeline_pages, "timeline")) {
    if (!e.contains("event") || !e["event"].is_string()) continue;
    const std::string event = e["event"].get<std::string>();
    InteractionEvent ev;
    if (event == "reviewed") {
      ev.kind = EventKind::kReview;
      ev.timestamp = ParseIso8601(RequireString(e, "submitted_at"));
    } else if (event == "commented") {
      ev.kind = EventKind::kComment;
      ev.timestamp = ParseIso8601(RequireString(e, "created_at"));
    } else {
      continue;
    }
    const std::string user_type = RequireString(e, "user.type");
    ev.author_kind = user_type == "Bot" ? ActorKind::kBot : ActorKind::kHuman;
    r.timeline.push_back(ev);
  }

  std::stable_sort(r.commits.begin(), r.commits.end(),
                   [](const Commit& a, const Commit& b) {
                     return a.timestamp < b.timestamp;
                   });
  std::stable_sort(r.timeline.begin(), r.timeline.end(),
                   [](const InteractionEvent& a, const InteractionEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  const auto violations = ValidateRecord(r);
  if (!violations.empty()) {
    throw Error(ErrorKind::kMapping,
                fmt::format("{}: mapped record invalid: {}", r.id,
                            violations.front()));
  }
  return r;
}

ForgeClient::ForgeClient(std::shared_ptr<HttpTransport> transport,
                         ForgeCredentials credentials,
                         ForgeClientOptions options, AgentRegistry registry,
                         Sleeper sleeper)
    : transport_(std::move(transport)),
      credentials_(std::move(credentials)),
      options_(options),
      registry_(std::move(registry)),
      sleeper_(std::move(sleeper)),
      slots_(std::clamp(options.max_in_flight, 1, 1024)) {
  if (!transport_) ThrowInvalidArgument("forge client needs a transport");
  if (options_.max_attempts < 1) ThrowInvalidArgument("max_attempts < 1");
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

HttpResponse ForgeClient::GetWithRetry(const std::string& path) {
  HttpHeaders headers = {{"Accept", "application/vnd.github+json"},
                         {"User-Agent", "prtriage"}};
  if (!credentials_.token.empty()) {
    headers.emplace_back("Authorization", "Bearer " + credentials_.token);
  }
  std::chrono::milliseconds delay = options_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    HttpResponse resp;
    {
      slots_.acquire();
      const int now = ++in_flight_;
      int seen = max_in_flight_seen_.load();
      while (now > seen && !max_in_flight_seen_.compare_exchange_weak(seen, now)) {
      }
      try {
        resp = transport_->Get(path, headers);
      } catch (...) {
        --in_flight_;
        slots_.release();
        throw;
      }
      --in_flight_;
      slots_.release();
    }
    if (resp.status >= 200 && resp.status < 300) return resp;
    if (resp.status == 404) {
      throw Error(ErrorKind::kNotFound, fmt::format("404 for {}", path));
    }
    const auto remaining = resp.headers.find("x-ratelimit-remaining");
    const auto retry_after = resp.headers.find("retry-after");
    const bool rate_limited =
        resp.status == 429 ||
        (resp.status == 403 &&
         ((remaining != resp.headers.end() && remaining->second == "0") ||
          retry_after != resp.headers.end()));
    const bool transient = resp.status >= 500;
    if (!rate_limited && !transient) {
      throw Error(ErrorKind::kForge,
                  fmt::format("HTTP {} for {}", resp.status, path));
    }
    if (attempt >= options_.max_attempts) {
      throw Error(rate_limited ? ErrorKind::kRateLimited : ErrorKind::kForge,
                  fmt::format("giving up on {} after {} attempts (HTTP {})",
                              path, attempt, resp.status));
    }
    std::chrono::milliseconds wait = delay;
    if (retry_after != resp.headers.end()) {
      const long secs = std::strtol(retry_after->second.c_str(), nullptr, 10);
      if (secs > 0) wait = std::chrono::seconds(secs);
    }
    wait = std::min(wait, options_.max_backoff);
    ++backoffs_;
    sleeper_(wait);
    delay = std::min(delay * 2, options_.max_backoff);
  }
}

std::vector<std::string> ForgeClient::GetPages(const std::string& path) {
  std::vector<std::string> pages;
  for (int page = 1;; ++page) {
    HttpResponse resp = GetWithRetry(fmt::format(
        "{}?per_page={}&page={}", path, options_.page_size, page));
    const json arr = ParseJson(resp.body, path);
    const size_t n = arr.is_array() ? arr.size() : 0;
    pages.push_back(std::move(resp.body));
    if (n < static_cast<size_t>(options_.page_size)) break;
  }
  return pages;
}

PullRequestRecord ForgeClient::FetchPullRequest(std::string_view repo,
                                                int number) {
  const std::string base = fmt::format("/repos/{}", repo);
  const HttpResponse pull =
      GetWithRetry(fmt::format("{}/pulls/{}", base, number));
  const auto files = GetPages(fmt::format("{}/pulls/{}/files", base, number));
  const auto commits =
      GetPages(fmt::format("{}/pulls/{}/commits", base, number));
  const auto timeline =
      GetPages(fmt::format("{}/issues/{}/timeline", base, number));
  return MapForgePayloads(repo, number, pull.body, files, commits, timeline,
                          registry_);
}

}  // namespace prtriage
