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

#pragma once

#include "weaver/narrative/narrative.hpp"
#include "weaver/recommender/recommender.hpp"
#include "weaver/service/config.hpp"

#include <string>

namespace weaver::service {

// OpenAI-compatible chat-completions client: one system + one user message in,
// the first choice's content out. Errors: Error{upstream} on transport failure,
// timeout, non-200 status or an unexpected response shape.
class ChatClient {
public:
    ChatClient(std::string url, std::string api_key, std::string model, double timeout_seconds);

    auto complete(const std::string& system, const std::string& user) const -> std::string;

private:
    std::string origin_;  // scheme://host:port
    std::string path_;
    std::string api_key_;
    std::string model_;
    double timeout_;
};

class RemoteGenerator final : public narrative::TextGenerator {
public:
    explicit RemoteGenerator(ChatClient client) : client_(std::move(client)) {}
    [[nodiscard]] auto id() const -> std::string override { return "remote"; }
    auto generate(const narrative::GenerationRequest& request) -> std::string override;

private:
    ChatClient client_;
};

// Sends {selectedText, summaries} and expects the recommendation list JSON back verbatim.
class RemoteRecommender final : public recommender::RecommenderBackend {
public:
    explicit RemoteRecommender(ChatClient client) : client_(std::move(client)) {}
    [[nodiscard]] auto id() const -> std::string override { return "remote"; }
    auto propose(const recommender::RecommendRequest& request) -> std::string override;

private:
    ChatClient client_;
};

auto read_key_file(const std::string& path) -> std::string;

}  // namespace weaver::service
