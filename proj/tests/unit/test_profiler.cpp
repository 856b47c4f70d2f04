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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "rfw/core/csv.hpp"
#include "rfw/core/error.hpp"
#include "rfw/profiler/profiler.hpp"

using namespace rfw;
using namespace rfw::profiler;

namespace {

Table load(const std::string& name, const std::string& table) {
    std::ifstream in(std::string(RFW_FIXTURE_DIR) + "/" + name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ingest_csv(ss.str(), table);
}

std::vector<std::string> names(const std::vector<ImputeFn>& fns) {
    std::vector<std::string> out;
    for (const auto& f : fns) out.push_back(to_string(f));
    return out;
}

}  // namespace

TEST(Profiler, F1RadioTable) {
    const TableProfiles p = profile_table(load("f1_rf.csv", "RF"), ProfilerConfig{});
    const auto* ts = p.find("timestamp");
    ASSERT_TRUE(ts);
    EXPECT_EQ(ts->role, ColumnRole::TimeIndex);
    EXPECT_EQ(ts->broad_type, BroadType::TimestampType);

    const auto* f = p.find("frequency");
    EXPECT_EQ(f->unit, Unit{UnitKind::MHz});
    EXPECT_EQ(f->role, ColumnRole::Grouping);
    EXPECT_TRUE(f->allowed_aggregations.empty());

    const auto* r = p.find("RSRP");
    EXPECT_EQ(r->unit, Unit{UnitKind::dBm});
    EXPECT_EQ(r->broad_type, BroadType::Numerical);
    EXPECT_EQ(r->role, ColumnRole::Aggregating);
    EXPECT_EQ(r->scale, Scale::Logarithmic);
    ASSERT_FALSE(r->allowed_aggregations.empty());
    EXPECT_EQ(r->allowed_aggregations.front(), AggFn::LogMean);
    EXPECT_FALSE(r->allows(AggFn::Mean));
    EXPECT_EQ(names(r->allowed_imputations), (std::vector<std::string>{"ffill", "bfill"}));
    EXPECT_EQ(p.time_index()->column, "timestamp");
}

TEST(Profiler, F1GpsTable) {
    const TableProfiles p = profile_table(load("f1_gps.csv", "GPS"), ProfilerConfig{});
    for (const char* c : {"latitude", "longitude"}) {
        const auto* x = p.find(c);
        EXPECT_EQ(x->unit, Unit{UnitKind::DecimalDegrees}) << c;
        EXPECT_EQ(x->role, ColumnRole::Aggregating) << c;
        EXPECT_EQ(names(x->allowed_imputations).front(), "ffill") << c;
    }
}

TEST(Profiler, F2CellsTable) {
    const TableProfiles p = profile_table(load("f2_cells.csv", "Cells"), ProfilerConfig{});
    const auto* chan = p.find("chan");
    EXPECT_EQ(chan->unit, Unit{UnitKind::EARFCN});
    EXPECT_EQ(chan->role, ColumnRole::Grouping);
    ASSERT_EQ(chan->cast_targets.size(), 1u);
    EXPECT_EQ(chan->cast_targets[0], Unit{UnitKind::MHz});

    const auto* id = p.find("cellid");
    EXPECT_EQ(id->unit, Unit{UnitKind::Hexadecimal});
    EXPECT_EQ(id->broad_type, BroadType::Categorical);
    EXPECT_EQ(id->role, ColumnRole::Grouping);

    const auto* plmn = p.find("PLMN");
    EXPECT_EQ(plmn->unit, Unit{UnitKind::NoUnit});
    EXPECT_EQ(plmn->broad_type, BroadType::Categorical);
    EXPECT_EQ(p.time_index(), nullptr);
}

TEST(Profiler, ScoreColumnIsOrdinal) {
    const Table t = ingest_csv("score,weight\n1,10.5\n4,11.25\n5,12.5\n2,9.75\n3,10.0\n", "T");
    const auto p = profile_table(t, ProfilerConfig{});
    EXPECT_EQ(p.find("score")->unit, Unit{UnitKind::NoUnit});
    EXPECT_EQ(p.find("score")->broad_type, BroadType::Ordinal);
    EXPECT_EQ(p.find("weight")->broad_type, BroadType::Numerical);
    EXPECT_EQ(p.find("weight")->role, ColumnRole::Aggregating);
}

TEST(Profiler, SecondTimestampColumnIsDemoted) {
    const Table t = ingest_csv(
        "gps_fix,timestamp,v\n2024-01-01T00:00:00Z,2024-01-01T00:00:00Z,1.5\n2024-01-01T00:00:01Z,"
        "2024-01-01T00:00:01Z,2.5\n",
        "T");
    const auto p = profile_table(t, ProfilerConfig{});
    EXPECT_EQ(p.time_index()->column, "timestamp");
    EXPECT_EQ(p.columns_with_role(ColumnRole::TimeIndex).size(), 1u);
    EXPECT_NE(p.find("gps_fix")->role, ColumnRole::TimeIndex);
}

TEST(Profiler, DeclaredUnitWins) {
    Table t = ingest_csv("chan\n800\n1000\n", "Cells");
    Column c = t.columns()[0];
    c.declared_unit = Unit{UnitKind::MHz};
    t = t.with_column(0, c);
    EXPECT_EQ(profile_column(t, "chan", ProfilerConfig{}).unit, Unit{UnitKind::MHz});
}

TEST(Prompts, UnitQuestionCarriesEvidence) {
    const Table t = load("f2_cells.csv", "Cells");
    const ColumnEvidence e = gather_evidence(t, "chan");
    const std::string prompt = render_prompt(QuestionKind::Unit, e, KeywordConfig::defaults());
    EXPECT_NE(prompt.find("named chan."), std::string::npos) << prompt;
    EXPECT_NE(prompt.find("It has a minimum value of 800.0, max value of 68661.0, and 18 unique values."),
              std::string::npos)
        << prompt;
    EXPECT_NE(prompt.find("'EARFCN'"), std::string::npos);
    EXPECT_NE(prompt.find("'decimal degrees'"), std::string::npos);
}

TEST(Prompts, RoleQuestionListsSiblings) {
    const Table t = load("f2_cells.csv", "Cells");
    ColumnEvidence e = gather_evidence(t, "chan");
    e.unit = Unit{UnitKind::EARFCN};
    const std::string prompt = render_prompt(QuestionKind::Role, e, KeywordConfig::defaults());
    EXPECT_NE(prompt.find("with other columns in the dataframe being ['cellid', 'PLMN']"), std::string::npos);
    EXPECT_NE(prompt.find("It has a unit of EARFCN."), std::string::npos);
}

TEST(Parsers, ClosedVocabulary) {
    const auto kw = KeywordConfig::defaults();
    EXPECT_EQ(parse_unit_answer("  EARFCN\n", kw), Unit{UnitKind::EARFCN});
    EXPECT_EQ(parse_unit_answer("\"dBm\".", kw), Unit{UnitKind::dBm});
    EXPECT_EQ(parse_unit_answer("No unit", kw), Unit{UnitKind::NoUnit});
    EXPECT_FALSE(parse_unit_answer("furlongs", kw));
    EXPECT_EQ(parse_broad_type_answer("numerical"), BroadType::Numerical);
    EXPECT_FALSE(parse_broad_type_answer("maybe"));
    EXPECT_EQ(parse_role_answer("grouping"), ColumnRole::Grouping);
    EXPECT_EQ(parse_aggregation_answer("log_mean"), AggFn::LogMean);
}

TEST(Keywords, ParseMergeAndCustomUnits) {
    auto cfg = KeywordConfig::parse("# site config\ncelsius = temp, temperature @ -50..60\ndBm = pwr\n");
    ASSERT_EQ(cfg.entries.size(), 2u);
    EXPECT_EQ(cfg.entries[0].unit, Unit::custom_unit("celsius"));
    ASSERT_TRUE(cfg.entries[0].range);
    EXPECT_EQ(cfg.entries[0].range->second, 60.0);

    auto merged = KeywordConfig::defaults();
    merged.merge(cfg);
    const auto vocab = merged.vocabulary();
    EXPECT_EQ(vocab.back(), "celsius");

    ProfilerConfig pc;
    pc.keywords = merged;
    const Table t = ingest_csv("temp,pwr\n21.5,-70.5\n22.0,-71.5\n", "T");
    const auto p = profile_table(t, pc);
    EXPECT_EQ(p.find("temp")->unit, Unit::custom_unit("celsius"));
    EXPECT_EQ(p.find("pwr")->unit, Unit{UnitKind::dBm});

    for (const char* bad : {"no equals sign", "= a, b", "x = a @ 1-2", "y =  "}) {
        try {
            KeywordConfig::parse(bad);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ConfigSyntax) << bad;
        }
    }
}

TEST(Strategies, Invariants) {
    const UnitKind kinds[] = {UnitKind::NoUnit, UnitKind::MHz,          UnitKind::Hz,     UnitKind::EARFCN,
                              UnitKind::dBm,    UnitKind::dB,           UnitKind::Hexadecimal, UnitKind::Decimal,
                              UnitKind::Seconds, UnitKind::Milliseconds, UnitKind::DecimalDegrees};
    for (auto k : kinds)
        for (auto b : {BroadType::TimestampType, BroadType::Categorical, BroadType::Numerical, BroadType::Ordinal})
            for (auto r : {ColumnRole::Grouping, ColumnRole::Aggregating, ColumnRole::TimeIndex}) {
                const auto s = synthesize_strategies(Unit{k}, b, r);
                const bool log_unit = k == UnitKind::dBm || k == UnitKind::dB;
                EXPECT_EQ(s.scale == Scale::Logarithmic, log_unit);
                if (r == ColumnRole::Grouping) {
                    EXPECT_TRUE(s.allowed_aggregations.empty());
                }
                if (log_unit && r != ColumnRole::Grouping) {
                    EXPECT_EQ(s.allowed_aggregations.front(), AggFn::LogMean);
                }
                if (log_unit) {
                    for (const auto& f : s.allowed_imputations) EXPECT_NE(f.kind, ImputeKind::Interpolate);
                }
            }
}

TEST(FixtureBackend, RecordedAnswersAndFallbacks) {
    auto backend = FixtureBackend::from_json(R"({"answers": [
        {"question": "unit", "column": "chan", "answer": "EARFCN"},
        {"question": "broad_type", "column": "chan", "answer": ["banana", "still banana"]},
        {"question": "role", "column": "chan", "answer": "grouping"}
    ]})");
    ProfilerConfig cfg;
    cfg.kind = BackendKind::Fixture;
    cfg.backend = backend;
    const Table t = load("f2_cells.csv", "Cells");
    const auto p = profile_column(t, "chan", cfg);
    EXPECT_EQ(p.unit, Unit{UnitKind::EARFCN});
    EXPECT_EQ(p.role, ColumnRole::Grouping);
    // broad type: two out-of-vocabulary answers, then the heuristic
    EXPECT_EQ(p.broad_type, BroadType::Numerical);
    int oov = 0;
    for (const auto& line : p.provenance) oov += line.find("out-of-vocabulary") != std::string::npos;
    EXPECT_EQ(oov, 2);

    // cellid has nothing recorded: backend unavailable, heuristic answers
    const auto q = profile_column(t, "cellid", cfg);
    EXPECT_EQ(q.unit, Unit{UnitKind::Hexadecimal});
    EXPECT_NE(q.provenance.front().find("unavailable"), std::string::npos);
    EXPECT_FALSE(backend->prompts().empty());
}

TEST(FixtureBackend, MalformedJson) {
    try {
        FixtureBackend::from_json("{\"answers\": [{}]}");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigSyntax);
    }
}

TEST(LlmBackend, TalksChatCompletions) {
    httplib::Server server;
    std::vector<std::string> seen_auth;
    std::mutex m;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        const std::string prompt = body["messages"][0]["content"];
        {
            std::lock_guard lock(m);
            seen_auth.push_back(req.get_header_value("Authorization"));
        }
        std::string answer = "no unit";
        if (prompt.find("named RSRP") != std::string::npos && prompt.find("Tell me the unit") != std::string::npos)
            answer = "dBm";
        else if (prompt.find("timestamp, categorical, numerical, or ordinal") != std::string::npos)
            answer = "numerical";
        else if (prompt.find("\"aggregating\" or \"grouping\"") != std::string::npos)
            answer = "aggregating";
        res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", answer}}}}}}}.dump(),
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("RFW_TEST_KEY", "sekrit", 1);
    ProfilerConfig cfg;
    cfg.kind = BackendKind::Llm;
    cfg.backend = std::make_shared<LlmBackend>(
        LlmConfig{"http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions", "m", "RFW_TEST_KEY", 5});
    const Table t = ingest_csv("RSRP\n-80.5\n-81.5\n", "RF");
    const auto p = profile_column(t, "RSRP", cfg);
    EXPECT_EQ(p.unit, Unit{UnitKind::dBm});
    EXPECT_EQ(p.role, ColumnRole::Aggregating);
    EXPECT_EQ(p.allowed_aggregations.front(), AggFn::LogMean);
    server.stop();
    th.join();
    ASSERT_FALSE(seen_auth.empty());
    EXPECT_EQ(seen_auth.front(), "Bearer sekrit");
}

TEST(LlmBackend, UnreachableEndpointFallsBack) {
    ProfilerConfig cfg;
    cfg.kind = BackendKind::Llm;
    cfg.backend = std::make_shared<LlmBackend>(LlmConfig{"http://127.0.0.1:1/v1/chat/completions", "m", "", 1});
    const Table t = ingest_csv("RSRP\n-80.5\n-81.5\n", "RF");
    const auto p = profile_column(t, "RSRP", cfg);
    EXPECT_EQ(p.unit, Unit{UnitKind::dBm});
    EXPECT_NE(p.provenance.front().find("unavailable"), std::string::npos);
}
