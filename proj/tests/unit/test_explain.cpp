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
#include <regex>
#include <set>
#include <sstream>

#include "rfw/core/csv.hpp"
#include "rfw/core/error.hpp"
#include "rfw/explain/explain.hpp"
#include "rfw/profiler/profiler.hpp"

using namespace rfw;
using namespace rfw::explain;
using constraints::Constraint;

namespace {

Table load(const std::string& name, const std::string& table) {
    std::ifstream in(std::string(RFW_FIXTURE_DIR) + "/" + name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ingest_csv(ss.str(), table);
}

struct F1 {
    Table rf = load("f1_rf.csv", "RF");
    Table gps = load("f1_gps.csv", "GPS");
    profiler::ProfileCatalog profiles;
    std::vector<Constraint> constraints;
    std::vector<constraints::ViolationReport> reports;
    std::vector<suggest::Suggestion> suggestions;

    F1() {
        const suggest::TableList tables{&rf, &gps};
        profiles.emplace("RF", profiler::profile_table(rf, {}));
        profiles.emplace("GPS", profiler::profile_table(gps, {}));
        const auto joins = constraints::propose_joins(tables, profiles);
        constraints.push_back(constraints::synthesize_tfd(rf, profiles.at("RF"), Duration{}, "R1"));
        constraints.push_back(*constraints::alignment_for(joins.at(0), rf, gps, Duration{}, "R2"));
        constraints.push_back(constraints::synthesize_tfd(gps, profiles.at("GPS"), Duration{}, "R3"));
        const auto units = constraints::profile_unit_resolver(profiles);
        for (const Table* t : tables)
            for (const auto& c : constraints) {
                const auto on = constraints::constraint_tables(c);
                if (std::find(on.begin(), on.end(), t->name()) != on.end()) reports.push_back(constraints::evaluate(*t, c, units));
            }
        const auto cands = suggest::prune_semantic(suggest::generate_candidates(tables, profiles, constraints, Duration{}),
                                                   tables, profiles);
        suggestions = suggest::rank_suggestions(suggest::score_all(cands, tables, profiles, constraints, Duration{}), {})
                          .suggestions;
    }

    Explanation of(std::size_t i) const { return explain::explain(suggestions.at(i), reports, constraints, profiles); }
};

std::multiset<std::string> numbers_in(const std::string& text) {
    static const std::regex number(R"(\d+(\.\d+)?)");
    std::multiset<std::string> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it)
        out.insert(it->str());
    return out;
}

}  // namespace

TEST(Percent, Rounding) {
    EXPECT_EQ(percent(Rational(2, 20)), "10");
    EXPECT_EQ(percent(Rational(3, 43)), "7");
    EXPECT_EQ(percent(Rational(1, 43)), "2");
    EXPECT_EQ(percent(Rational(1, 8)), "13");
    EXPECT_EQ(percent(Rational(0, 1)), "0");
    EXPECT_EQ(percent_one_decimal(Rational(3, 43)), "7.0");
    EXPECT_EQ(percent_one_decimal(Rational(1, 43)), "2.3");
    EXPECT_EQ(percent_one_decimal(Rational(1, 16)), "6.3");
    EXPECT_EQ(percent_one_decimal(Rational(1, 1)), "100.0");
}

TEST(Brief, F1Sentences) {
    F1 f;
    ASSERT_EQ(f.suggestions.size(), 4u);
    EXPECT_EQ(f.of(0).brief,
              "W1 removes 7% of rows by merging readings into one row per 1s and frequency with log_mean on RSRP, "
              "satisfying R1 and R2");
    EXPECT_EQ(f.of(1).brief, "W2 modifies 7% of rows by flooring timestamp to 1s, satisfying R2");
    EXPECT_EQ(f.of(2).brief, "W3 inserts 10% new rows, satisfying R3");
    EXPECT_EQ(f.of(3).brief,
              "W4 modifies 2% of rows by filling null RSRP cells with forward fill, grouped by frequency, satisfying R1");
    EXPECT_EQ(explain_brief(f.suggestions[2], f.reports), f.of(2).brief);
}

TEST(Brief, ZeroEffectRound) {
    suggest::Suggestion s;
    s.id = "W1";
    s.op = dsl::Round{"T", "t", Duration{}, std::nullopt};
    s.side_effect.rows_before = 10;
    EXPECT_EQ(explain_brief(s, {}), "W1 modifies 0% of rows by flooring t to 1s");
}

TEST(Detailed, GpsUpsampleCitesMissingRangeAndRationale) {
    F1 f;
    const auto e = f.of(2);
    EXPECT_EQ(e.detailed.rfind(e.brief + ".", 0), 0u);
    EXPECT_NE(e.detailed.find("R3 (GPS: [1s] -> latitude, longitude) has 2 missing buckets in GPS."), std::string::npos);
    EXPECT_NE(e.detailed.find("from 2 to 0"), std::string::npos);
    EXPECT_NE(e.detailed.find("missing from 2024-01-01T12:00:11.000Z to 2024-01-01T12:00:12.000Z"), std::string::npos);
    EXPECT_NE(e.detailed.find("repeat the last known latitude and longitude"), std::string::npos);
    EXPECT_NE(e.detailed.find("stationary"), std::string::npos);
    EXPECT_NE(e.detailed.find("(10.0% of the sample)"), std::string::npos);
}

TEST(Detailed, LogMeanCitesLogarithmicScale) {
    F1 f;
    const auto e = f.of(0);
    EXPECT_NE(e.detailed.find("RSRP is measured in dBm, a logarithmic scale"), std::string::npos);
    EXPECT_NE(e.detailed.find("3 duplicate rows and 1 null cell"), std::string::npos);
    EXPECT_NE(e.detailed.find("3 misaligned keys"), std::string::npos);
}

TEST(Detailed, ImputeMentionsGroup) {
    F1 f;
    const auto e = f.of(3);
    EXPECT_NE(e.detailed.find("previous RSRP reading of the same frequency"), std::string::npos);
    EXPECT_NE(e.detailed.find("R1"), std::string::npos);
}

TEST(Detailed, EmptyRangeOmitsRangeClause) {
    suggest::Suggestion s;
    s.id = "W1";
    s.op = dsl::Impute{"T", "v", {}, {}};
    s.side_effect = {10, 1, 0, 0, 1, 0};
    s.gains = {{"R1", 1, 0}};
    const std::vector<Constraint> cs{constraints::TemporalFD{"R1", "T", Duration{}, "t", {}, {"v"}}};
    constraints::ViolationReport r;
    r.constraint_id = "R1";
    r.table = "T";
    r.total_degree = 1;
    r.null_cells = 1;
    const auto e = explain::explain(s, {r}, cs, {});
    EXPECT_EQ(e.detailed.find("lie between"), std::string::npos);
    EXPECT_EQ(e.detailed.find("missing from"), std::string::npos);
    r.violated_span = constraints::TimeRange{Timestamp{0}, Timestamp{1'000'000'000}};
    EXPECT_NE(explain::explain(s, {r}, cs, {}).detailed.find("lie between 1970-01-01T00:00:00.000Z and 1970-01-01T00:00:01.000Z"),
              std::string::npos);
}

TEST(Facts, EveryNumberIsAFact) {
    F1 f;
    for (std::size_t i = 0; i < f.suggestions.size(); ++i) {
        const auto e = f.of(i);
        std::multiset<std::string> known;
        for (const auto& fact : e.facts)
            for (const auto& n : numbers_in(fact.value)) known.insert(n);
        for (const auto& text : {e.brief, e.detailed})
            for (const auto& n : numbers_in(text)) EXPECT_TRUE(known.count(n)) << n << " in: " << text;
    }
}

TEST(Facts, PercentagesMatchSideEffect) {
    F1 f;
    for (std::size_t i = 0; i < f.suggestions.size(); ++i) {
        const auto e = f.of(i);
        const double exact = 100.0 * dsl::to_json(f.suggestions[i].side_effect)["row_fraction_value"].get<double>();
        for (const auto& fact : e.facts) {
            if (fact.kind == "percent") {
                EXPECT_LE(std::abs(std::stod(fact.value) - exact), 0.5);
            }
            if (fact.kind == "percent_detailed") {
                EXPECT_LE(std::abs(std::stod(fact.value) - exact), 0.05);
            }
        }
    }
}

TEST(Facts, ConstraintIdsResolve) {
    F1 f;
    std::set<std::string> ids;
    for (const auto& c : f.constraints) ids.insert(constraints::constraint_id(c));
    static const std::regex rid(R"(\bR\d+\b)");
    for (std::size_t i = 0; i < f.suggestions.size(); ++i) {
        const auto e = f.of(i);
        for (auto it = std::sregex_iterator(e.detailed.begin(), e.detailed.end(), rid); it != std::sregex_iterator(); ++it)
            EXPECT_TRUE(ids.count(it->str())) << it->str();
    }
}

TEST(Explain, Deterministic) {
    F1 f;
    const auto a = to_json(f.of(0)).dump();
    for (int i = 0; i < 5; ++i) EXPECT_EQ(to_json(f.of(0)).dump(), a);
}

TEST(Templates, ParseAndOverride) {
    const auto t = Templates::parse("# c\nbrief.upsample = {id} adds {pct}% rows{satisfying}\n\n");
    suggest::Suggestion s;
    s.id = "W9";
    s.op = dsl::Upsample{"T", "t", Duration{}, {}, {}};
    s.side_effect = {20, 0, 2, 0, 0, 0};
    EXPECT_EQ(explain_brief(s, {}, t), "W9 adds 10% rows");
    EXPECT_TRUE(Templates::shipped().has("brief.cast"));
    for (const char* bad : {"no equals sign\n", " = value\n"}) {
        try {
            Templates::parse(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ConfigSyntax);
        }
    }
    try {
        Templates::parse("x = {missing}").render("x", {});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigSyntax);
    }
    EXPECT_EQ(depth_from_string("detailed"), Depth::Detailed);
}

TEST(Templates, ShippedTextHasNoDigits) {
    // numbers may only come from facts
    const auto path = std::string(RFW_SOURCE_DIR) + "/data/explain_templates_v1.conf";
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        ASSERT_NE(eq, std::string::npos);
        EXPECT_TRUE(numbers_in(line.substr(eq)).empty()) << line;
    }
}
