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

#include "anchoring.hpp"
#include "fixtures.hpp"
#include "weaver/export/export.hpp"
#include "weaver/service/api.hpp"
#include "weaver/service/remote.hpp"

#include <catch_amalgamated.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

using namespace weaver;
using namespace weaver::service;
using nlohmann::json;

namespace {

auto env_of(std::map<std::string, std::string> values) -> EnvLookup {
    return [values = std::move(values)](const std::string& key) -> std::optional<std::string> {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return it->second;
    };
}

template <typename F>
auto code_of(F&& f) -> std::string {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

struct Client {
    Api& api;

    auto call(std::string method, std::string path, const json& body = nullptr,
              std::map<std::string, std::string> query = {}) -> std::pair<int, json> {
        Request r{std::move(method), std::move(path), body.is_null() ? "" : body.dump(), std::move(query)};
        auto res = api.handle(r);
        return {res.status, json::parse(res.body)};
    }
    auto raw(std::string method, std::string path, std::string body, std::map<std::string, std::string> query = {})
        -> std::pair<int, json> {
        auto res = api.handle({std::move(method), std::move(path), std::move(body), std::move(query)});
        return {res.status, json::parse(res.body)};
    }
};

auto error_code(const json& body) -> std::string { return body.at("error").at("code").get<std::string>(); }

auto leaf_ids(const json& hierarchy) -> std::vector<std::string> {
    std::vector<std::string> out;
    for (const auto& f : hierarchy.at("statTable").at("facts")) out.push_back(f.at("id"));
    for (const auto& g : hierarchy.at("factTypeGroups")) {
        for (const auto& a : g.at("attributeGroups")) {
            for (const auto& f : a.at("facts")) out.push_back(f.at("id"));
        }
    }
    return out;
}

auto brush_json(double x0, double x1, double y0, double y1) -> json {
    callout::Callout c{{}, callout::CalloutKind::brush2d, callout::AxisRange{x0, x1}, callout::AxisRange{y0, y1}};
    return callout::callout_to_json(c);
}

// Story with the gapminder table, a scatterplot and a connected text-node.
struct Pipeline {
    Client client;
    std::string story;
    std::string dataset;
    std::string chart;
    std::string text;

    explicit Pipeline(Api& api) : client{api} {
        auto [s1, created] = client.call("POST", "/stories", {{"title", "Life expectancy"}});
        REQUIRE(s1 == 201);
        story = created.at("story").at("id");
        auto [s2, summary] = client.raw("POST", base() + "/datasets", testing::gapminder_csv(), {{"name", "gapminder"}});
        REQUIRE(s2 == 201);
        dataset = summary.at("datasetId");
        auto spec = testing::scatter_spec(*testing::gapminder());
        spec.dataset_id = dataset;
        auto [s3, vis] = client.call("POST", base() + "/nodes",
                                     {{"kind", "vis"}, {"datasetId", dataset}, {"spec", chart::serialize_spec(spec)}});
        REQUIRE(s3 == 201);
        chart = vis.at("nodeId");
        auto [s4, txt] = client.call("POST", base() + "/nodes",
                                     {{"kind", "text"}, {"content", story::richtext_to_json(story::plain("Life expectancy rose."))}});
        REQUIRE(s4 == 201);
        text = txt.at("nodeId");
        auto [s5, edge] = client.call("POST", base() + "/edges", {{"from", chart}, {"to", text}});
        REQUIRE(s5 == 201);
    }

    [[nodiscard]] auto base() const -> std::string { return "/stories/" + story; }
    [[nodiscard]] auto node(const std::string& id) const -> std::string { return base() + "/nodes/" + id; }

    auto callout(const json& body, std::map<std::string, std::string> query = {}) -> json {
        auto [status, out] = client.call("POST", node(chart) + "/callout", body, std::move(query));
        REQUIRE(status == 200);
        return out;
    }
};

class ScriptedGenerator final : public narrative::TextGenerator {
public:
    explicit ScriptedGenerator(std::function<std::string(const narrative::GenerationRequest&)> f) : f_(std::move(f)) {}
    [[nodiscard]] auto id() const -> std::string override { return "scripted"; }
    auto generate(const narrative::GenerationRequest& r) -> std::string override { return f_(r); }

private:
    std::function<std::string(const narrative::GenerationRequest&)> f_;
};

// Local OpenAI-shaped endpoint on a free port.
struct MockRemote {
    httplib::Server server;
    int port = 0;
    std::thread thread;
    std::vector<json> requests;
    std::vector<std::string> auth;
    std::mutex mutex;

    explicit MockRemote(std::function<void(const json&, httplib::Response&)> reply) {
        server.Post("/v1/chat/completions", [this, reply](const httplib::Request& req, httplib::Response& res) {
            const auto body = json::parse(req.body);
            {
                std::lock_guard lock(mutex);
                requests.push_back(body);
                auth.push_back(req.get_header_value("Authorization"));
            }
            reply(body, res);
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~MockRemote() {
        server.stop();
        thread.join();
    }
    [[nodiscard]] auto url() const -> std::string {
        return fmt::format("http://127.0.0.1:{}/v1/chat/completions", port);
    }
};

auto completion(const std::string& content) -> std::string {
    return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

auto temp_dir(const std::string& name) -> std::filesystem::path {
    auto dir = std::filesystem::temp_directory_path() / fmt::format("weaver-{}-{}", name, ::getpid());
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

auto key_file(const std::filesystem::path& dir) -> std::string {
    auto path = dir / "key";
    std::ofstream(path) << "sk-test-123\n";
    return path.string();
}

}  // namespace

TEST_CASE("config from environment", "[api][config]") {
    auto c = config_from_env(env_of({}));
    CHECK(c.host == "127.0.0.1");
    CHECK(c.port == 8080);
    CHECK(c.backend == Backend::deterministic);
    CHECK(c.timeout_seconds == 30.0);

    c = config_from_env(env_of({{"WEAVER_ADDR", "0.0.0.0:9001"},
                                {"WEAVER_GENERATOR", "remote"},
                                {"WEAVER_REMOTE_URL", "https://example.test/v1/chat/completions"},
                                {"WEAVER_REMOTE_KEY_FILE", "/tmp/key"},
                                {"WEAVER_STORE_DIR", "/tmp/stories"}}));
    CHECK(c.host == "0.0.0.0");
    CHECK(c.port == 9001);
    CHECK(c.backend == Backend::remote);
    CHECK(c.store_dir == "/tmp/stories");

    CHECK(code_of([] { config_from_env(env_of({{"WEAVER_GENERATOR", "remote"}})); }) == "invalid_config");
    CHECK(code_of([] {
              config_from_env(env_of({{"WEAVER_GENERATOR", "remote"}, {"WEAVER_REMOTE_URL", "https://x.test/"}}));
          }) == "invalid_config");
    CHECK(code_of([] { config_from_env(env_of({{"WEAVER_REMOTE_URL", "https://x.test/"}})); }) == "invalid_config");
    CHECK(code_of([] { config_from_env(env_of({{"WEAVER_ADDR", "localhost"}})); }) == "invalid_config");
    CHECK(code_of([] { config_from_env(env_of({{"WEAVER_ADDR", "h:70000"}})); }) == "invalid_config");
    CHECK(code_of([] { config_from_env(env_of({{"WEAVER_GENERATOR", "gpt"}})); }) == "invalid_config");
    CHECK(code_of([] { config_from_env(env_of({{"WEAVER_TIMEOUT", "0"}})); }) == "invalid_config");
}

TEST_CASE("routing and error mapping", "[api]") {
    Api api(ServiceConfig{});
    Client c{api};
    CHECK(c.call("GET", "/health").first == 200);
    CHECK(error_code(c.call("GET", "/nope").second) == "no_route");
    CHECK(c.call("GET", "/stories/zz").first == 404);

    Pipeline p(api);
    auto [s1, b1] = c.call("POST", p.node("n99") + "/callout", brush_json(0, 1, 0, 1));
    CHECK(s1 == 404);
    CHECK(error_code(b1) == "node_not_found");

    auto [s2, b2] = c.raw("POST", p.base() + "/nodes", "{not json");
    CHECK(s2 == 400);
    CHECK(error_code(b2) == "malformed_json");

    auto [s3, b3] = c.call("POST", p.base() + "/edges", {{"from", p.chart}, {"to", p.text}});
    CHECK(s3 == 409);
    CHECK(error_code(b3) == "duplicate_edge");

    auto [s4, b4] = c.call("POST", p.base() + "/nodes", {{"kind", "vis"}, {"datasetId", "nope"}});
    CHECK(s4 == 404);
    CHECK(error_code(b4) == "dataset_not_found");

    auto bad = chart::serialize_spec(testing::scatter_spec(*testing::gapminder()));
    bad["yAttr"] = "country";
    bad["datasetId"] = p.dataset;
    auto [s5, b5] = c.call("POST", p.base() + "/nodes", {{"kind", "vis"}, {"datasetId", p.dataset}, {"spec", bad}});
    CHECK(s5 == 400);
    CHECK(error_code(b5) == "invalid_spec");
    CHECK(b5.at("error").contains("field"));

    auto [s6, b6] = c.call("POST", p.node(p.text) + "/narrative");
    CHECK(s6 == 400);
    CHECK(error_code(b6) == "empty_facts");
}

TEST_CASE("stale selections answer 409", "[api]") {
    Api api(ServiceConfig{});
    Pipeline p(api);
    auto first = p.callout(brush_json(0, 20000, 40, 80));
    const auto old_ids = leaf_ids(first.at("hierarchy"));
    REQUIRE_FALSE(old_ids.empty());
    (void)p.callout(brush_json(0, 50000, 30, 85));
    auto [status, body] = p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", {old_ids.front()}}});
    CHECK(status == 409);
    CHECK(error_code(body) == "facts_stale");
}

TEST_CASE("full pipeline with the deterministic backend", "[api][pipeline]") {
    Api api(ServiceConfig{});
    Pipeline p(api);
    auto out = p.callout(brush_json(0, 20000, 40, 80));
    CHECK(out.at("events").size() >= 1);
    const auto ids = leaf_ids(out.at("hierarchy"));
    REQUIRE(ids.size() >= 3);

    auto [s1, selected] = p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", ids}});
    REQUIRE(s1 == 200);
    REQUIRE(selected.at("carts").contains(p.text));
    std::vector<facts::DataFact> cart;
    for (const auto& g : selected.at("carts").at(p.text)) {
        for (const auto& f : g.at("facts")) cart.push_back(facts::fact_from_json(f));
    }
    CHECK(cart.size() == ids.size());

    auto [s2, result] = p.client.call("POST", p.node(p.text) + "/narrative");
    REQUIRE(s2 == 200);
    const auto narrative = narrative::result_from_json(result);
    CHECK(narrative.generator_id == "deterministic");
    CHECK(testing::missing_numbers(narrative.text, cart).empty());
    CHECK(narrative.prompt.context_block.find("Life expectancy rose.") != std::string::npos);

    auto [s3, accepted] = p.client.call("POST", p.node(p.text) + "/narrative/accept");
    REQUIRE(s3 == 200);
    CHECK(accepted.at("content").at("paragraphs").size() == 2);

    std::vector<std::string> hashes;
    for (const auto* fmt_name : {"continuous", "scrolly", "stepper"}) {
        auto [s4, exported] = p.client.call("GET", p.base() + "/export", nullptr, {{"format", fmt_name}});
        REQUIRE(s4 == 200);
        const auto render = exporting::render_from_json(exported.at("render"));
        REQUIRE(render.sections.size() == 1);
        hashes.push_back(render.sections[0].hash);
        CHECK(exported.at("files").contains("index.html"));
        CHECK(exported.at("files").contains("data/" + p.dataset + ".csv"));
        CHECK(testing::missing_numbers(render.sections[0].segments.back().text, cart).empty());
    }
    CHECK(hashes[0] == hashes[1]);
    CHECK(hashes[1] == hashes[2]);

    auto [s5, bad] = p.client.call("GET", p.base() + "/export", nullptr, {{"format", "slides"}});
    CHECK(s5 == 400);
    CHECK(error_code(bad) == "unknown_format");
}

TEST_CASE("endpoint bodies equal engine serializations", "[api][contract]") {
    Api api(ServiceConfig{});
    Pipeline p(api);
    const auto callout_body = brush_json(0, 20000, 40, 80);
    auto out = p.callout(callout_body, {{"attrs", "lifeExp"}});
    const auto ids = leaf_ids(out.at("hierarchy"));
    (void)p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", ids}});
    auto [status, result] = p.client.call("POST", p.node(p.text) + "/narrative");
    REQUIRE(status == 200);

    // The same operations straight on the engine.
    story::StoryGraph g(p.story, "Life expectancy");
    g.add_dataset(std::make_shared<const tabular::Dataset>(
        tabular::load_dataset(testing::gapminder_csv(), "gapminder", {.id = p.dataset, .forced_types = {}})));
    auto spec = testing::scatter_spec(*testing::gapminder());
    spec.dataset_id = p.dataset;
    const auto chart = g.add_vis_node(spec, p.dataset);
    const auto text = g.add_text_node(story::plain("Life expectancy rose."));
    g.connect(chart, text);
    g.apply_callout(chart, callout::callout_from_json(callout_body), {"lifeExp"});
    CHECK(json::parse(organizer::hierarchy_to_json(g.node(chart).vis_cart.hierarchy).dump()) == out.at("hierarchy"));
    g.select_facts(chart, {ids.begin(), ids.end()});
    const auto& src = g.node(chart);
    auto prompt = narrative::assemble_prompt(g.cart_facts(text), *src.spec, src.package->chart_metadata,
                                             src.package->interaction, "Life expectancy rose.",
                                             src.vis_cart.hierarchy.stat_table);
    narrative::DeterministicGenerator gen;
    CHECK(narrative::result_to_json(narrative::generate(prompt, gen)) == result);

    auto [s2, summary] = p.client.call("GET", p.base() + "/datasets/" + p.dataset + "/summary");
    CHECK(summary == recommender::summary_to_json(recommender::summarize_dataset(*g.dataset(p.dataset))));

    auto [s3, container] = p.client.call("GET", p.base());
    auto [s4, node] = p.client.call("GET", p.node(p.chart));
    CHECK(node.at("hierarchy") == container.at("nodes").at(0).at("hierarchy"));
}

TEST_CASE("revision endpoints", "[api][narrative]") {
    Api api(ServiceConfig{});
    Pipeline p(api);
    auto out = p.callout(brush_json(0, 20000, 40, 80));
    (void)p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", leaf_ids(out.at("hierarchy"))}});
    auto [s0, first] = p.client.call("POST", p.node(p.text) + "/narrative");
    REQUIRE(s0 == 200);
    const std::string text = first.at("text");

    const json shorten = {{"targetSpan", {{"begin", 0}, {"end", text.size()}}}, {"mode", "shorten"}};
    auto [s1, b1] = p.client.call("POST", p.node(p.text) + "/narrative/revise", shorten);
    CHECK(s1 == 400);
    CHECK(error_code(b1) == "not_accepted");

    (void)p.client.call("POST", p.node(p.text) + "/narrative/accept");
    auto [s2, revised] = p.client.call("POST", p.node(p.text) + "/narrative/revise", shorten);
    REQUIRE(s2 == 200);
    CHECK(revised.at("accepted") == "pending");
    CHECK(testing::missing_numbers(revised.at("text"), narrative::result_from_json(revised).anchored_facts).empty());

    auto [s3, rejected] = p.client.call("POST", p.node(p.text) + "/narrative/reject");
    CHECK(s3 == 200);
    CHECK(rejected.at("narrative").at("accepted") == "rejected");

    const json bad_span = {{"targetSpan", {{"begin", 5}, {"end", 1}}}, {"mode", "shorten"}};
    (void)p.client.call("POST", p.node(p.text) + "/narrative");
    (void)p.client.call("POST", p.node(p.text) + "/narrative/accept");
    auto [s4, b4] = p.client.call("POST", p.node(p.text) + "/narrative/revise", bad_span);
    CHECK(s4 == 400);
    CHECK(error_code(b4) == "span_out_of_bounds");
    auto [s5, b5] = p.client.call("POST", p.node(p.text) + "/narrative/revise", {{"mode", "shorten"}, {"extra", 1}});
    CHECK(s5 == 400);
    CHECK(error_code(b5) == "unknown_field");
}

TEST_CASE("generator failure returns 502 with the prompt", "[api][narrative]") {
    Api api(ServiceConfig{},
            [] {
                return std::make_unique<ScriptedGenerator>(
                    [](const narrative::GenerationRequest&) -> std::string {
                        throw Error(ErrorKind::upstream, "remote_timeout", "timed out");
                    });
            },
            nullptr);
    Pipeline p(api);
    auto out = p.callout(brush_json(0, 20000, 40, 80));
    (void)p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", leaf_ids(out.at("hierarchy"))}});
    auto [status, body] = p.client.call("POST", p.node(p.text) + "/narrative");
    CHECK(status == 502);
    CHECK(error_code(body) == "generator_failed");
    REQUIRE(body.contains("prompt"));
    CHECK(narrative::prompt_from_json(body["prompt"]).facts.size() == leaf_ids(out.at("hierarchy")).size());
    auto [s2, node] = p.client.call("GET", p.node(p.text));
    CHECK(node.at("narrative").is_null());
}

TEST_CASE("a newer generation supersedes an older one", "[api][concurrency]") {
    std::mutex m;
    std::condition_variable cv;
    int calls = 0;
    bool release = false;
    Api api(ServiceConfig{},
            [&] {
                return std::make_unique<ScriptedGenerator>([&](const narrative::GenerationRequest& r) {
                    std::unique_lock lock(m);
                    const int call = ++calls;
                    cv.notify_all();
                    if (call == 1) cv.wait(lock, [&] { return release; });
                    return narrative::DeterministicGenerator::compose(*r.prompt, call);
                });
            },
            nullptr);
    Pipeline p(api);
    auto out = p.callout(brush_json(0, 20000, 40, 80));
    (void)p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", leaf_ids(out.at("hierarchy"))}});

    auto slow = std::async(std::launch::async, [&] { return p.client.call("POST", p.node(p.text) + "/narrative"); });
    {
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return calls == 1; });
    }
    auto fast = p.client.call("POST", p.node(p.text) + "/narrative");
    {
        std::lock_guard lock(m);
        release = true;
    }
    cv.notify_all();
    auto older = slow.get();
    CHECK(fast.first == 200);
    CHECK(older.first == 409);
    CHECK(error_code(older.second) == "superseded");
    auto [s, node] = p.client.call("GET", p.node(p.text));
    CHECK(node.at("narrative").at("text") == fast.second.at("text"));
}

TEST_CASE("story CRUD and persistence", "[api][store]") {
    const auto dir = temp_dir("store");
    ServiceConfig config;
    config.store_dir = dir.string();
    json saved;
    std::string story;
    {
        Api api(config);
        Pipeline p(api);
        auto out = p.callout(brush_json(0, 20000, 40, 80));
        (void)p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", leaf_ids(out.at("hierarchy"))}});
        story = p.story;
        saved = p.client.call("GET", p.base()).second;
        CHECK(std::filesystem::exists(dir / (story + ".json")));
    }
    Api reopened(config);
    Client c{reopened};
    auto [s1, loaded] = c.call("GET", "/stories/" + story);
    REQUIRE(s1 == 200);
    CHECK(loaded == saved);
    CHECK(c.call("POST", "/stories", {{"title", "next"}}).second.at("story").at("id") != story);

    auto [s2, dup] = c.call("POST", "/stories", saved);
    CHECK(s2 == 409);
    CHECK(error_code(dup) == "story_exists");
    auto renamed = saved;
    renamed["story"]["id"] = "imported";
    CHECK(c.call("POST", "/stories", renamed).first == 201);
    auto [s3, mismatch] = c.call("PUT", "/stories/" + story, renamed);
    CHECK(s3 == 400);
    CHECK(error_code(mismatch) == "story_id_mismatch");
    renamed["story"]["title"] = "Edited";
    CHECK(c.call("PUT", "/stories/imported", renamed).second.at("story").at("title") == "Edited");
    auto v2 = saved;
    v2["version"] = 2;
    CHECK(error_code(c.call("PUT", "/stories/" + story, v2).second) == "unsupported_version");
    CHECK(c.call("DELETE", "/stories/imported").first == 200);
    CHECK_FALSE(std::filesystem::exists(dir / "imported.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("graph endpoints return cart deltas", "[api][graph]") {
    Api api(ServiceConfig{});
    Pipeline p(api);
    auto out = p.callout(brush_json(0, 20000, 40, 80));
    const auto ids = leaf_ids(out.at("hierarchy"));
    (void)p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", {ids[0]}}});

    auto [s1, second] = p.client.call("POST", p.base() + "/nodes", {{"kind", "text"}, {"rect", {{"x", 500}}}});
    REQUIRE(s1 == 201);
    const std::string other = second.at("nodeId");
    CHECK(second.at("node").at("rect").at("x") == 500.0);
    auto [s2, connected] = p.client.call("POST", p.base() + "/edges", {{"from", p.chart}, {"to", other}});
    CHECK(connected.at("carts").at(other).size() == 1);

    auto [s3, removed] = p.client.call("DELETE", p.base() + "/edges", nullptr, {{"from", p.chart}, {"to", other}});
    CHECK(s3 == 200);
    CHECK(removed.at("carts").at(other).empty());
    auto [s4, missing] = p.client.call("DELETE", p.base() + "/edges", nullptr, {{"from", p.chart}, {"to", other}});
    CHECK(s4 == 404);
    CHECK(error_code(missing) == "unknown_edge");

    auto [s5, dup] = p.client.call("POST", p.node(p.chart) + "/duplicate");
    CHECK(s5 == 201);
    CHECK(dup.at("node").at("kind") == "vis");

    auto [s6, moved] = p.client.call("PUT", p.node(p.chart) + "/layout", {{"x", 10}, {"y", 20}});
    CHECK(moved.at("rect") == json{{"x", 10.0}, {"y", 20.0}, {"width", 400.0}, {"height", 300.0}});

    auto [s7, gone] = p.client.call("DELETE", p.node(p.chart));
    CHECK(s7 == 200);
    CHECK(gone.at("carts").at(p.text).empty());
    auto [s8, nodes] = p.client.call("GET", p.base() + "/nodes");
    CHECK(nodes.at("nodes").size() == 3);
}

TEST_CASE("recommend and materialize", "[api][recommender]") {
    Api api(ServiceConfig{});
    Client c{api};
    auto sid = c.call("POST", "/stories", {{"title", "Olympics"}}).second.at("story").at("id").get<std::string>();
    std::string csv = "year,sex,count\n";
    for (int y = 1900; y <= 2016; y += 4) {
        csv += fmt::format("{},female,{}\n", y, 20 + (y - 1900) * 40);
        csv += fmt::format("{},male,{}\n", y, 1500 + (y - 1900) * 30);
    }
    auto did = c.raw("POST", "/stories/" + sid + "/datasets", csv, {{"name", "olympics"}}).second.at("datasetId");
    auto text = c.call("POST", "/stories/" + sid + "/nodes", {{"kind", "text"}}).second.at("nodeId").get<std::string>();
    const auto base = "/stories/" + sid + "/nodes/" + text;

    auto [s1, recs] = c.call("POST", base + "/recommend",
                             {{"selectedText", "Women's participation in the Olympics has increased over time"}});
    REQUIRE(s1 == 200);
    REQUIRE_FALSE(recs.at("recommendations").empty());
    CHECK(recs.at("recommendations")[0].at("spec").at("chartType") == "line");
    CHECK(recs.at("recommendations")[0].at("valid") == true);

    auto [s2, made] = c.call("POST", base + "/recommend/materialize", {{"index", 0}});
    REQUIRE(s2 == 201);
    const std::string vis = made.at("nodeId");
    auto [s3, story] = c.call("GET", "/stories/" + sid);
    CHECK(story.at("edges").size() == 1);
    CHECK(story.at("datasets").size() == 2);

    callout::Callout brush{{}, callout::CalloutKind::timeframe_brush, callout::AxisRange{1960.0, 2000.0}};
    auto [s4, facts] = c.call("POST", "/stories/" + sid + "/nodes/" + vis + "/callout", callout::callout_to_json(brush));
    REQUIRE(s4 == 200);
    bool trend = false;
    for (const auto& g : facts.at("hierarchy").at("factTypeGroups")) trend = trend || g.at("factType") == "trend";
    CHECK(trend);

    auto [s5, none] = c.call("POST", base + "/recommend/materialize", {{"index", 7}});
    CHECK(s5 == 404);
    auto [s6, empty] = c.call("POST", base + "/recommend", {{"selectedText", ""}});
    CHECK(s6 == 400);
    CHECK(error_code(empty) == "empty_text");
    auto [s7, unrelated] = c.call("POST", base + "/recommend", {{"selectedText", "The weather was lovely."}});
    CHECK(unrelated.at("recommendations").empty());
    CHECK(unrelated.at("reason").is_string());
}

TEST_CASE("remote chat client", "[api][remote]") {
    MockRemote ok([](const json& body, httplib::Response& res) {
        res.set_content(completion("echo:" + body.at("messages").at(1).at("content").get<std::string>()),
                        "application/json");
    });
    ChatClient client(ok.url(), "sk-test", "test-model", 5.0);
    CHECK(client.complete("sys", "hello") == "echo:hello");
    REQUIRE(ok.requests.size() == 1);
    CHECK(ok.requests[0].at("model") == "test-model");
    CHECK(ok.requests[0].at("messages").at(0).at("content") == "sys");
    CHECK(ok.auth[0] == "Bearer sk-test");

    MockRemote slow([](const json&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1500));
        res.set_content(completion("late"), "application/json");
    });
    const auto t0 = std::chrono::steady_clock::now();
    CHECK(code_of([&] { ChatClient(slow.url(), "k", "m", 0.3).complete("s", "u"); }) == "remote_timeout");
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::milliseconds(1400));

    MockRemote failing([](const json&, httplib::Response& res) {
        res.status = 503;
        res.set_content("{}", "application/json");
    });
    CHECK(code_of([&] { ChatClient(failing.url(), "k", "m", 5).complete("s", "u"); }) == "remote_status");

    MockRemote garbled([](const json&, httplib::Response& res) { res.set_content("{\"choices\": []}", "application/json"); });
    CHECK(code_of([&] { ChatClient(garbled.url(), "k", "m", 5).complete("s", "u"); }) == "remote_malformed");

    CHECK(code_of([] { ChatClient("http://127.0.0.1:1/v1", "k", "m", 1).complete("s", "u"); }) ==
          "remote_unreachable");
}

TEST_CASE("remote backend through the api", "[api][remote]") {
    const auto dir = temp_dir("remote");
    std::vector<std::string> cart_numbers;
    MockRemote mock([&](const json& body, httplib::Response& res) {
        const std::string user = body.at("messages").at(1).at("content");
        if (user.rfind("{", 0) == 0) {
            res.set_content(completion("{\"recommendations\": []}"), "application/json");
        } else {
            res.set_content(completion("Remote narrative."), "application/json");
        }
    });
    ServiceConfig config;
    config.backend = Backend::remote;
    config.remote_url = mock.url();
    config.remote_key_file = key_file(dir);
    config.timeout_seconds = 5;
    Api api(config);
    Pipeline p(api);
    auto out = p.callout(brush_json(0, 20000, 40, 80));
    (void)p.client.call("POST", p.node(p.chart) + "/facts/select", {{"factIds", leaf_ids(out.at("hierarchy"))}});
    auto [s1, result] = p.client.call("POST", p.node(p.text) + "/narrative");
    REQUIRE(s1 == 200);
    CHECK(result.at("text") == "Remote narrative.");
    CHECK(result.at("generatorId") == "remote");
    CHECK(mock.auth.back() == "Bearer sk-test-123");
    const std::string sent = mock.requests.back().at("messages").at(1).at("content");
    CHECK(sent.find("## Data Facts") != std::string::npos);

    auto [s2, recs] = p.client.call("POST", p.node(p.text) + "/recommend", {{"selectedText", "life expectancy"}});
    CHECK(s2 == 200);
    CHECK(recs.at("recommendations").empty());

    auto [s3, story] = p.client.call("GET", p.base());
    CHECK(story.dump().find("sk-test-123") == std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("http server and openapi", "[api][http]") {
    Api api(ServiceConfig{});
    HttpServer server(api);
    const int port = server.bind("127.0.0.1", 0);
    std::thread thread([&] { server.listen(); });
    httplib::Client client("127.0.0.1", port);
    for (int i = 0; i < 100 && !server.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    auto created = client.Post("/stories", R"({"title":"t"})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string sid = json::parse(created->body).at("story").at("id");
    auto upload = client.Post(("/stories/" + sid + "/datasets?name=gap").c_str(), testing::gapminder_csv(), "text/csv");
    REQUIRE(upload);
    CHECK(upload->status == 201);
    CHECK(json::parse(upload->body).at("name") == "gap");

    auto doc = client.Get("/openapi.json");
    REQUIRE(doc);
    const auto spec = json::parse(doc->body);
    CHECK(spec.at("openapi") == "3.0.3");
    for (const auto* path : {"/stories/{sid}/nodes/{nid}/callout", "/stories/{sid}/nodes/{nid}/narrative/revise",
                             "/stories/{sid}/export", "/stories/{sid}/nodes/{nid}/recommend/materialize"}) {
        CHECK(spec.at("paths").contains(path));
    }
    CHECK(spec.at("components").at("schemas").at("Callout").at("properties").contains("kind"));
    CHECK(spec.at("components").at("schemas").at("NarrativeResult").at("properties").contains("anchoredFacts"));

    server.stop();
    thread.join();
}
