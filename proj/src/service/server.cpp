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

#include "weaver/service/api.hpp"

#include <fmt/format.h>
#include <httplib.h>

namespace weaver::service {

struct HttpServer::Impl {
    Api& api;
    httplib::Server server;
    explicit Impl(Api& a) : api(a) {}
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        Request request{req.method, req.path, req.body, {}};
        for (const auto& [key, value] : req.params) request.query[key] = value;
        const auto response = impl_->api.handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    };
    auto& s = impl_->server;
    s.Get(".*", handler);
    s.Post(".*", handler);
    s.Put(".*", handler);
    s.Delete(".*", handler);
    const auto timeout = api.config().timeout_seconds;
    const auto whole = static_cast<time_t>(timeout);
    s.set_read_timeout(whole, static_cast<time_t>((timeout - static_cast<double>(whole)) * 1e6));
    s.set_payload_max_length(256UL * 1024 * 1024);
}

HttpServer::~HttpServer() { stop(); }

auto HttpServer::bind(const std::string& host, int port) -> int {
    auto& s = impl_->server;
    if (port == 0) {
        const int bound = s.bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorKind::internal, "bind_failed", fmt::format("cannot bind {}", host));
        return bound;
    }
    if (!s.bind_to_port(host, port))
        throw Error(ErrorKind::internal, "bind_failed", fmt::format("cannot bind {}:{}", host, port));
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

auto HttpServer::running() const -> bool { return impl_->server.is_running(); }

}  // namespace weaver::service
