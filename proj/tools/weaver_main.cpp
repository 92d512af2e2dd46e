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

#include "weaver/export/export.hpp"
#include "weaver/service/api.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace weaver;

service::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

auto read_file(const std::string& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read {}", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct ServeOptions {
    std::string addr;
    std::string generator;
    std::string remote_url;
    std::string remote_key_file;
    std::string remote_model;
    std::string store_dir;
    double timeout = 0.0;
};

// Flags override the environment.
auto serve(const ServeOptions& o) -> int {
    auto env = service::process_env();
    auto lookup = [&](const std::string& key) -> std::optional<std::string> {
        const std::pair<const char*, const std::string*> flags[] = {
            {"WEAVER_ADDR", &o.addr},
            {"WEAVER_GENERATOR", &o.generator},
            {"WEAVER_REMOTE_URL", &o.remote_url},
            {"WEAVER_REMOTE_KEY_FILE", &o.remote_key_file},
            {"WEAVER_REMOTE_MODEL", &o.remote_model},
            {"WEAVER_STORE_DIR", &o.store_dir},
        };
        for (const auto& [name, value] : flags) {
            if (key == name && !value->empty()) return *value;
        }
        if (key == "WEAVER_TIMEOUT" && o.timeout > 0.0) return fmt::format("{}", o.timeout);
        return env(key);
    };
    const auto config = service::config_from_env(lookup);
    service::Api api(config);
    service::HttpServer server(api);
    const int port = server.bind(config.host, config.port);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    fmt::print("weaver listening on http://{}:{} (generator: {})\n", config.host, port,
               config.backend == service::Backend::remote ? "remote" : "deterministic");
    std::fflush(stdout);
    server.listen();
    g_server = nullptr;
    return 0;
}

struct ExportOptions {
    std::string story_file;
    std::string format = "continuous";
    std::string order;
    std::string out_dir;
    bool json_only = false;
};

auto export_story(const ExportOptions& o) -> int {
    const auto doc = nlohmann::json::parse(read_file(o.story_file));
    const auto graph = story::load_story(doc);
    const auto format = exporting::parse_format(o.format);
    if (!format) fail("unknown_format", fmt::format("unknown export format '{}'", o.format), "format");
    auto outline = exporting::build_outline(graph);
    if (!o.order.empty()) {
        std::vector<std::size_t> perm;
        std::stringstream in(o.order);
        for (std::string item; std::getline(in, item, ',');) perm.push_back(std::stoul(item));
        outline = exporting::reorder(outline, perm);
    }
    const auto rendered = exporting::render(outline, *format, graph);
    if (o.json_only) {
        std::cout << exporting::render_to_json(rendered).dump(2) << '\n';
        return 0;
    }
    const auto bundle = exporting::make_bundle(rendered, graph);
    exporting::write_bundle(bundle, o.out_dir);
    fmt::print("wrote {} files to {}\n", bundle.files.size(), o.out_dir);
    return 0;
}

}  // namespace

auto main(int argc, char** argv) -> int {
    CLI::App app{"weaver: data-driven story authoring service"};
    app.require_subcommand(1);

    ServeOptions serve_opts;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("--addr", serve_opts.addr, "host:port (WEAVER_ADDR, default 127.0.0.1:8080)");
    serve_cmd->add_option("--generator", serve_opts.generator, "deterministic|remote (WEAVER_GENERATOR)")
        ->check(CLI::IsMember({"deterministic", "remote"}));
    serve_cmd->add_option("--remote-url", serve_opts.remote_url, "chat-completions URL (WEAVER_REMOTE_URL)");
    serve_cmd->add_option("--remote-key-file", serve_opts.remote_key_file, "API key file (WEAVER_REMOTE_KEY_FILE)");
    serve_cmd->add_option("--remote-model", serve_opts.remote_model, "model name (WEAVER_REMOTE_MODEL)");
    serve_cmd->add_option("--timeout", serve_opts.timeout, "request timeout seconds (WEAVER_TIMEOUT)");
    serve_cmd->add_option("--store-dir", serve_opts.store_dir, "story directory (WEAVER_STORE_DIR)");

    ExportOptions export_opts;
    auto* export_cmd = app.add_subcommand("export", "Render a saved story container without a server");
    export_cmd->add_option("story", export_opts.story_file, "story container JSON")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("-f,--format", export_opts.format, "continuous|scrolly|stepper");
    export_cmd->add_option("--order", export_opts.order, "block permutation, e.g. 2,0,1");
    export_cmd->add_option("-o,--out", export_opts.out_dir, "bundle directory");
    export_cmd->add_flag("--json", export_opts.json_only, "print the render JSON instead of writing a bundle");

    auto* openapi_cmd = app.add_subcommand("openapi", "Print the OpenAPI description");

    CLI11_PARSE(app, argc, argv);
    try {
        if (serve_cmd->parsed()) return serve(serve_opts);
        if (export_cmd->parsed()) {
            if (!export_opts.json_only && export_opts.out_dir.empty()) {
                std::cerr << "export: --out is required unless --json is given\n";
                return 2;
            }
            return export_story(export_opts);
        }
        if (openapi_cmd->parsed()) {
            std::cout << service::openapi_document().dump(2) << '\n';
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << fmt::format("error [{}]: {}\n", e.code(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
