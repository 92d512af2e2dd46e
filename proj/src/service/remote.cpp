/*
 * Copyright (C) 2026 The Weaver Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "weaver/service/remote.hpp"

#include "weaver/common/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <sstream>

namespace weaver::service {

namespace {

using nlohmann::json;

constexpr std::string_view kNarrativeSystem =
    "You write narrative text for a data story. Follow the task, keep every number from the data facts "
    "exactly as written and do not add numbers that are not in the facts.";

constexpr std::string_view kRecommendSystem =
    "You recommend charts for a passage of story text. The user message holds the passage and dataset "
    "summaries. Reply with JSON only: {\"recommendations\": [{\"rationale\": string, \"plan\": "
    "{\"sourceDataset\": id, \"steps\": [...]}, \"spec\": chart spec}]} with at most three entries, or an "
    "empty list when the data cannot support the passage.";

[[noreturn]] void upstream(std::string code, const std::string& message) {
    throw Error(ErrorKind::upstream, std::move(code), message);
}

auto timeout_parts(double seconds) -> std::pair<time_t, time_t> {
    const auto micros = static_cast<long long>(seconds * 1e6);
    return {static_cast<time_t>(micros / 1000000), static_cast<time_t>(micros % 1000000)};
}

}  // namespace

ChatClient::ChatClient(std::string url, std::string api_key, std::string model, double timeout_seconds)
    : api_key_(std::move(api_key)), model_(std::move(model)), timeout_(timeout_seconds) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) fail("invalid_config", fmt::format("remote URL '{}' has no scheme", url));
    const auto slash = url.find('/', scheme + 3);
    origin_ = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

auto ChatClient::complete(const std::string& system, const std::string& user) const -> std::string {
    httplib::Client client(origin_);
    const auto [sec, usec] = timeout_parts(timeout_);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    if (!api_key_.empty()) client.set_bearer_token_auth(api_key_);

    const json body = {
        {"model", model_},
        {"temperature", 0},
        {"messages", json::array({{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}})},
    };
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout)
            upstream("remote_timeout", fmt::format("remote backend timed out ({})", httplib::to_string(err)));
        upstream("remote_unreachable", fmt::format("remote backend unreachable ({})", httplib::to_string(err)));
    }
    if (res->status != 200)
        upstream("remote_status", fmt::format("remote backend answered HTTP {}", res->status));

    const json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) upstream("remote_malformed", "remote backend returned invalid JSON");
    const auto* content = [&]() -> const json* {
        if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
            return nullptr;
        const auto& first = doc["choices"][0];
        if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) return nullptr;
        const auto& message = first["message"];
        if (!message.contains("content") || !message["content"].is_string()) return nullptr;
        return &message["content"];
    }();
    if (content == nullptr) upstream("remote_malformed", "remote response has no choices[0].message.content");
    return content->get<std::string>();
}

auto RemoteGenerator::generate(const narrative::GenerationRequest& request) -> std::string {
    return client_.complete(std::string(kNarrativeSystem), request.prompt_text);
}

auto RemoteRecommender::propose(const recommender::RecommendRequest& request) -> std::string {
    return client_.complete(std::string(kRecommendSystem), recommender::request_to_json(request).dump());
}

auto read_key_file(const std::string& path) -> std::string {
    std::ifstream in(path);
    if (!in) fail("invalid_config", fmt::format("cannot read key file '{}'", path), "remote_key_file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string key = buffer.str();
    while (!key.empty() && (key.back() == '\n' || key.back() == '\r' || key.back() == ' ')) key.pop_back();
    return key;
}

}  // namespace weaver::service
