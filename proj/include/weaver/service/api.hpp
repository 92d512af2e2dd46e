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

#include "weaver/common/error.hpp"
#include "weaver/narrative/narrative.hpp"
#include "weaver/recommender/recommender.hpp"
#include "weaver/service/config.hpp"
#include "weaver/story/graph.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace weaver::service {

struct Request {
    std::string method;
    std::string path;
    std::string body;
    std::map<std::string, std::string> query;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

auto status_of(ErrorKind kind) -> int;
auto error_body(const Error& error) -> nlohmann::json;

// Transport-free router over the engine. Every handler parses a module JSON
// shape, calls one engine operation and serializes the engine result.
class Api {
public:
    using GeneratorFactory = std::function<std::unique_ptr<narrative::TextGenerator>()>;
    using RecommenderFactory =
        std::function<std::unique_ptr<recommender::RecommenderBackend>(const recommender::DatasetLookup&)>;

    explicit Api(ServiceConfig config);
    Api(ServiceConfig config, GeneratorFactory generators, RecommenderFactory recommenders);

    auto handle(const Request& request) -> Response;

    [[nodiscard]] auto config() const -> const ServiceConfig& { return config_; }

private:
    struct Entry {
        std::mutex mutex;
        story::StoryGraph graph;
        std::map<std::string, std::uint64_t> tickets;  // latest generation per text-node
        std::map<std::string, std::string> selected_text;  // last recommend input per text-node
        explicit Entry(story::StoryGraph g) : graph(std::move(g)) {}
    };

    auto entry(const std::string& story_id) -> std::shared_ptr<Entry>;
    auto create_story(std::string title) -> std::shared_ptr<Entry>;
    void persist(const Entry& entry) const;
    void load_store();

    auto route(const Request& request) -> Response;

    ServiceConfig config_;
    GeneratorFactory generators_;
    RecommenderFactory recommenders_;
    std::mutex store_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> stories_;
    std::atomic<std::uint64_t> next_ticket_{0};
    int story_counter_ = 0;

    friend struct Handlers;
};

auto openapi_document() -> nlohmann::json;

// Blocking HTTP/1.1 server over an Api. stop() may be called from another thread.
class HttpServer {
public:
    explicit HttpServer(Api& api);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    auto operator=(const HttpServer&) -> HttpServer& = delete;

    auto bind(const std::string& host, int port) -> int;  // port 0 picks a free port
    void listen();                                        // after bind
    void stop();
    [[nodiscard]] auto running() const -> bool;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace weaver::service
