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

#include <functional>
#include <optional>
#include <string>

namespace weaver::service {

enum class Backend { deterministic, remote };

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    Backend backend = Backend::deterministic;
    std::string remote_url;       // full chat-completions URL
    std::string remote_key_file;  // file holding the API key; never stored in stories
    std::string remote_model = "gpt-4o";
    double timeout_seconds = 30.0;
    std::string store_dir;  // empty: stories live in memory only

    // Errors: invalid_config (remote fields set iff backend is remote, bad port/timeout).
    void validate() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// WEAVER_ADDR (host:port), WEAVER_GENERATOR, WEAVER_REMOTE_URL, WEAVER_REMOTE_KEY_FILE,
// WEAVER_REMOTE_MODEL, WEAVER_TIMEOUT, WEAVER_STORE_DIR.
auto config_from_env(const EnvLookup& lookup) -> ServiceConfig;
auto process_env() -> EnvLookup;

// Errors: invalid_config.
auto parse_address(const std::string& addr, ServiceConfig& config) -> void;
auto parse_backend(const std::string& name) -> Backend;

}  // namespace weaver::service
