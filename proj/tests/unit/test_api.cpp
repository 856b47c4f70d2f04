/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "rfw/session/server.hpp"

using namespace rfw;
using namespace rfw::session;
using nlohmann::json;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(RFW_FIXTURE_DIR) + "/" + name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Api : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("rfw_api_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::remove_all(dir_);
        store_ = std::make_shared<SessionStore>(dir_, std::make_shared<const SessionConfig>());
        server_ = std::make_unique<ApiServer>(store_);
        port_ = server_->bind("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_->serve(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
        for (int i = 0; i < 200 && !server_->running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    void TearDown() override {
        server_->stop();
        thread_.join();
        std::filesystem::remove_all(dir_);
    }

    json post(const std::string& path, const json& body, int expect = 200) {
        auto r = client_->Post(path, body.dump(), "application/json");
        EXPECT_TRUE(r);
        if (!r) return {};
        EXPECT_EQ(r->status, expect) << path << ": " << r->body;
        return json::parse(r->body);
    }
    json get(const std::string& path, int expect = 200) {
        auto r = client_->Get(path);
        EXPECT_TRUE(r);
        if (!r) return {};
        EXPECT_EQ(r->status, expect) << path << ": " << r->body;
        return json::parse(r->body);
    }
    std::string get_text(const std::string& path) {
        auto r = client_->Get(path);
        EXPECT_TRUE(r && r->status == 200);
        return r ? r->body : "";
    }

    // Session with F1 uploaded and the pipeline run.
    std::string f1() {
        const std::string id = post("/sessions", json::object(), 201)["id"];
        auto r = client_->Post("/sessions/" + id + "/tables?name=RF", read_fixture("f1_rf.csv"), "text/csv");
        EXPECT_EQ(r->status, 201);
        post("/sessions/" + id + "/tables", {{"name", "GPS"}, {"csv", read_fixture("f1_gps.csv")}}, 201);
        post("/sessions/" + id + "/pipeline", json::object());
        return id;
    }

    std::filesystem::path dir_;
    std::shared_ptr<SessionStore> store_;
    std::unique_ptr<ApiServer> server_;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
    int port_ = 0;
};

}  // namespace

TEST_F(Api, CreateUploadPreview) {
    const std::string id = post("/sessions", json::object(), 201)["id"];
    EXPECT_TRUE(valid_session_id(id));
    auto r = client_->Post("/sessions/" + id + "/tables?name=RF", read_fixture("f1_rf.csv"), "text/csv");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 201);
    const auto j = json::parse(r->body);
    EXPECT_EQ(j["row_count"], 43);
    EXPECT_EQ(j["rows"].size(), 5u);
}

TEST_F(Api, PipelineListsFourSuggestionsAndThreeConstraints) {
    const std::string id = post("/sessions", json::object(), 201)["id"];
    post("/sessions/" + id + "/tables", {{"name", "RF"}, {"csv", read_fixture("f1_rf.csv")}}, 201);
    post("/sessions/" + id + "/tables", {{"name", "GPS"}, {"csv", read_fixture("f1_gps.csv")}}, 201);
    const auto p = post("/sessions/" + id + "/pipeline", json::object());
    EXPECT_EQ(p["suggestions"].size(), 4u);
    EXPECT_EQ(p["constraints"].size(), 3u);
    EXPECT_EQ(p["profiles"].size(), 2u);
    EXPECT_EQ(p["delta"]["chosen"], "1s");
    EXPECT_FALSE(p["delta"]["scores"].empty());
    const auto s = get("/sessions/" + id + "/suggestions");
    EXPECT_EQ(s["suggestions"], p["suggestions"]);
}

TEST_F(Api, ErrorMapping) {
    EXPECT_EQ(get("/sessions/0123456789abcdef/suggestions", 404)["error"], "UnknownSession");
    const std::string id = post("/sessions", json::object(), 201)["id"];
    auto bad = client_->Post("/sessions/" + id + "/tables?name=X", "a,b\n1,2\n3\n", "text/csv");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    const auto e = json::parse(bad->body);
    EXPECT_EQ(e["error"], "MalformedCsv");
    EXPECT_EQ(e["row"], 3);
    post("/sessions/" + id + "/tables", {{"name", "RF"}, {"csv", read_fixture("f1_rf.csv")}}, 201);
    EXPECT_EQ(post("/sessions/" + id + "/tables", {{"name", "RF"}, {"csv", "a\n1\n"}}, 409)["error"], "NameTaken");
    EXPECT_EQ(post("/sessions/" + id + "/policy", {{"p", 0.2}}, 409)["error"], "InvalidPhase");
    auto junk = client_->Post("/sessions/" + id + "/policy", "{nope", "application/json");
    EXPECT_EQ(junk->status, 400);
}

TEST_F(Api, PolicyDeltaAndTfds) {
    const auto id = f1();
    EXPECT_EQ(post("/sessions/" + id + "/policy", {{"k", 1}})["suggestions"].size(), 1u);
    EXPECT_TRUE(post("/sessions/" + id + "/policy", {{"p", "0%"}, {"k", 4}})["suggestions"].empty());
    EXPECT_EQ(post("/sessions/" + id + "/policy", {{"p", 0.1}, {"k", 0}}, 400)["error"], "InvalidArgument");
    EXPECT_EQ(post("/sessions/" + id + "/delta", {{"delta", "7s"}}, 400)["error"], "InvalidDelta");
    EXPECT_EQ(post("/sessions/" + id + "/delta", {{"delta", "10s"}})["delta"]["chosen"], "10s");
    const auto t = post("/sessions/" + id + "/tfds",
                        {{"table", "GPS"}, {"delta", "10s"}, {"time_column", "timestamp"}, {"determined", {"latitude"}}});
    EXPECT_EQ(t["constraints"].size(), 4u);
    EXPECT_EQ(post("/sessions/" + id + "/tfds",
                   {{"table", "GPS"}, {"delta", "1s"}, {"time_column", "timestamp"}, {"determined", {"zzz"}}}, 400)["error"],
              "UnknownColumn");
}

TEST_F(Api, PreviewApplySkipExplain) {
    const auto id = f1();
    const auto s = get("/sessions/" + id + "/suggestions");
    const auto gen = s["generation"].get<std::uint64_t>();
    std::string upsample;
    for (const auto& x : s["suggestions"])
        if (x["op"]["kind"] == "upsample") upsample = x["id"];
    ASSERT_FALSE(upsample.empty());

    const auto pv = get("/sessions/" + id + "/suggestions/" + upsample + "/preview?generation=" + std::to_string(gen));
    int inserted = 0;
    for (const auto& m : pv["markers"]) inserted += m == "inserted";
    EXPECT_EQ(inserted, 2);
    EXPECT_EQ(get("/sessions/" + id + "/suggestions")["generation"], gen);

    const auto ex = get("/sessions/" + id + "/suggestions/W3/explanation?depth=detailed");
    EXPECT_EQ(ex["depth"], "detailed");
    EXPECT_FALSE(ex["text"].get<std::string>().empty());
    EXPECT_EQ(get("/sessions/" + id + "/suggestions/W3/explanation")["text"], "W3 inserts 10% new rows, satisfying R3");
    EXPECT_EQ(get("/sessions/" + id + "/suggestions/W3/explanation?depth=deep", 400)["error"], "InvalidArgument");

    const auto a = post("/sessions/" + id + "/suggestions/" + upsample + "/apply", {{"generation", gen}});
    EXPECT_EQ(a["effect"]["rows_inserted"], 2);
    EXPECT_GT(a["generation"].get<std::uint64_t>(), gen);
    EXPECT_EQ(post("/sessions/" + id + "/suggestions/W1/apply", {{"generation", gen}}, 409)["error"], "StaleSuggestion");
    EXPECT_EQ(post("/sessions/" + id + "/suggestions/W9/apply", json::object(), 404)["error"], "UnknownSuggestion");

    const auto before = get("/sessions/" + id + "/suggestions")["suggestions"].size();
    const auto k = post("/sessions/" + id + "/suggestions/W1/skip", json::object());
    EXPECT_LE(k["suggestions"].size(), before);
    EXPECT_EQ(get_text("/sessions/" + id + "/script"),
              "upsample table=GPS time=timestamp delta=1s fill=latitude:ffill,longitude:ffill\n");
}

TEST_F(Api, JoinAndExport) {
    const auto id = f1();
    const auto j = post("/sessions/" + id + "/join", {{"left", "RF"}, {"right", "GPS"}, {"kind", "inner"}});
    EXPECT_EQ(j["table"], "RF_GPS");
    EXPECT_EQ(j["on"], json::parse(R"([["timestamp","timestamp"]])"));
    const auto csv = get_text("/sessions/" + id + "/tables/RF_GPS/export");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), j["rows"].get<int>() + 1);
    EXPECT_EQ(get_text("/sessions/" + id + "/tables/RF/export").substr(0, 23), "timestamp,frequency,RSR");
    EXPECT_EQ(get("/sessions/" + id + "/tables/Nope/export", 404)["error"], "UnknownTable");
    EXPECT_EQ(post("/sessions/" + id + "/join", {{"left", "RF"}, {"right", "GPS"}, {"kind", "outer"}}, 400)["error"],
              "InvalidArgument");
}

TEST_F(Api, SessionsSurviveRestart) {
    const auto id = f1();
    post("/sessions/" + id + "/suggestions/W1/apply", json::object());
    const auto before = get("/sessions/" + id + "/suggestions");
    const auto rf = get_text("/sessions/" + id + "/tables/RF/export");

    SessionStore fresh(dir_, std::make_shared<const SessionConfig>());
    EXPECT_EQ(fresh.read(id, [](const Session& s) { return s.suggestions_json(); }), before);
    EXPECT_EQ(fresh.read(id, [](const Session& s) { return s.export_table("RF"); }), rf);
}

TEST_F(Api, ConcurrentSessionsStayIndependent) {
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(f1());
    std::vector<std::thread> workers;
    std::vector<std::string> scripts(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        workers.emplace_back([&, i] {
            httplib::Client c("127.0.0.1", port_);
            for (std::size_t n = 0; n <= i % 2; ++n)
                c.Post("/sessions/" + ids[i] + "/suggestions/W1/apply", "{}", "application/json");
            scripts[i] = c.Get("/sessions/" + ids[i] + "/script")->body;
        });
    for (auto& w : workers) w.join();
    for (std::size_t i = 0; i < ids.size(); ++i)
        EXPECT_EQ(std::count(scripts[i].begin(), scripts[i].end(), '\n'), static_cast<long>(i % 2 + 1));
}
