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

#include "weaver/service/config.hpp"

#include "weaver/common/error.hpp"
#include "weaver/tabular/dataset.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cstdlib>

namespace weaver::service {

namespace {

[[noreturn]] void bad(const std::string& message, std::string field) {
    fail("invalid_config", message, std::move(field));
}

}  // namespace

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535) bad(fmt::format("port {} out of range", port), "addr");
    if (host.empty()) bad("empty listen host", "addr");
    if (!(timeout_seconds > 0.0)) bad("timeout must be positive", "timeout");
    const bool remote = backend == Backend::remote;
    if (remote && remote_url.empty()) bad("remote backend needs WEAVER_REMOTE_URL", "remote_url");
    if (remote && remote_key_file.empty()) bad("remote backend needs WEAVER_REMOTE_KEY_FILE", "remote_key_file");
    if (!remote && !remote_url.empty()) bad("WEAVER_REMOTE_URL set without the remote backend", "remote_url");
    if (!remote && !remote_key_file.empty())
        bad("WEAVER_REMOTE_KEY_FILE set without the remote backend", "remote_key_file");
    if (remote && remote_url.rfind("http://", 0) != 0 && remote_url.rfind("https://", 0) != 0)
        bad("remote URL must start with http:// or https://", "remote_url");
}

auto parse_address(const std::string& addr, ServiceConfig& config) -> void {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) bad(fmt::format("address '{}' is not host:port", addr), "addr");
    const std::string port_text = addr.substr(colon + 1);
    int port = -1;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size())
        bad(fmt::format("address '{}' has a bad port", addr), "addr");
    config.host = addr.substr(0, colon);
    config.port = port;
}

auto parse_backend(const std::string& name) -> Backend {
    if (name == "deterministic") return Backend::deterministic;
    if (name == "remote") return Backend::remote;
    bad(fmt::format("unknown generator backend '{}'", name), "generator");
}

auto config_from_env(const EnvLookup& lookup) -> ServiceConfig {
    ServiceConfig config;
    if (auto v = lookup("WEAVER_ADDR")) parse_address(*v, config);
    if (auto v = lookup("WEAVER_GENERATOR")) config.backend = parse_backend(*v);
    if (auto v = lookup("WEAVER_REMOTE_URL")) config.remote_url = *v;
    if (auto v = lookup("WEAVER_REMOTE_KEY_FILE")) config.remote_key_file = *v;
    if (auto v = lookup("WEAVER_REMOTE_MODEL")) config.remote_model = *v;
    if (auto v = lookup("WEAVER_TIMEOUT")) {
        const auto seconds = tabular::parse_number(*v);
        if (!seconds) bad(fmt::format("timeout '{}' is not a number", *v), "timeout");
        config.timeout_seconds = *seconds;
    }
    if (auto v = lookup("WEAVER_STORE_DIR")) config.store_dir = *v;
    config.validate();
    return config;
}

auto process_env() -> EnvLookup {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* value = std::getenv(name.c_str());
        if (value == nullptr || *value == '\0') return std::nullopt;
        return std::string(value);
    };
}

}  // namespace weaver::service
