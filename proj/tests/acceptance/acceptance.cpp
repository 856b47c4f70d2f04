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

// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "rfw/constraints/constraints.hpp"
#include "rfw/core/csv.hpp"
#include "rfw/core/error.hpp"
#include "rfw/dsl/bands.hpp"
#include "rfw/dsl/exec.hpp"
#include "rfw/dsl/script.hpp"
#include "rfw/session/join.hpp"
#include "rfw/session/session.hpp"

namespace fs = std::filesystem;
using namespace rfw;

namespace {

constexpr std::int64_t k_sec = 1'000'000'000LL;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture(const std::string& name) { return read_file(fs::path(RFW_FIXTURE_DIR) / name); }

std::int64_t fdiv(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

// Bucket enumeration over the full grid: every (bucket, key) cell contributes
// its surplus rows, its null determined cells, or 1 when empty.
struct OracleV {
    std::int64_t total = 0;
    std::int64_t duplicates = 0;
    std::int64_t missing = 0;
    std::int64_t buckets = 0;
    std::int64_t keys = 0;
};

OracleV oracle_tfd(const Table& t, const std::string& time, const std::vector<std::string>& grouping,
                   const std::vector<std::string>& determined, std::int64_t delta) {
    std::map<std::pair<std::int64_t, std::string>, std::vector<std::size_t>> cells;
    std::set<std::string> keys;
    std::int64_t lo = INT64_MAX, hi = INT64_MIN;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        const Cell& c = t.column(time).cells[r];
        if (c.kind() != CellKind::Timestamp) continue;
        std::string key;
        for (const auto& g : grouping) key += t.column(g).cells[r].to_string() + "|";
        const std::int64_t b = fdiv(c.as_timestamp().ns, delta);
        lo = std::min(lo, b);
        hi = std::max(hi, b);
        keys.insert(key);
        cells[{b, key}].push_back(r);
    }
    OracleV v;
    if (lo > hi) return v;
    v.buckets = hi - lo + 1;
    v.keys = static_cast<std::int64_t>(keys.size());
    for (std::int64_t b = lo; b <= hi; ++b)
        for (const auto& k : keys) {
            auto it = cells.find({b, k});
            if (it == cells.end()) {
                ++v.missing;
                continue;
            }
            v.duplicates += static_cast<std::int64_t>(it->second.size()) - 1;
            for (std::size_t r : it->second)
                for (const auto& d : determined) v.total += t.column(d).cells[r].is_null();
        }
    v.total += v.duplicates + v.missing;
    return v;
}

std::size_t null_count(const Table& t) {
    std::size_t n = 0;
    for (const auto& c : t.columns())
        for (const auto& v : c.cells) n += v.is_null();
    return n;
}

std::unique_ptr<session::Session> f1_session(const std::string& gps_csv) {
    auto s = std::make_unique<session::Session>("acceptance", nullptr);
    s->upload_table("RF", fixture("f1_rf.csv"));
    s->upload_table("GPS", gps_csv);
    s->run_pipeline();
    return s;
}

bool is_expected_op(const dsl::WranglingOp& op, const std::string& kind) {
    if (kind == "impute") {
        const auto* o = std::get_if<dsl::Impute>(&op);
        return o && o->table == "RF" && o->column == "RSRP" && o->method.kind == ImputeKind::ForwardFill &&
               o->group_by == std::vector<std::string>{"frequency"};
    }
    if (kind == "downsample") {
        const auto* o = std::get_if<dsl::Downsample>(&op);
        return o && o->table == "RF" && o->delta == Duration::from_seconds(1) && o->agg.size() == 1 &&
               o->agg[0].first == "RSRP" && o->agg[0].second == AggFn::LogMean;
    }
    if (kind == "round") {
        const auto* o = std::get_if<dsl::Round>(&op);
        return o && o->table == "RF" && o->column == "timestamp" && o->granularity == Duration::from_seconds(1);
    }
    if (kind == "upsample") {
        const auto* o = std::get_if<dsl::Upsample>(&op);
        if (!o || o->table != "GPS" || o->delta != Duration::from_seconds(1) || o->fill.empty()) return false;
        for (const auto& [col, fn] : o->fill)
            if (fn.kind != ImputeKind::ForwardFill) return false;
        return true;
    }
    return false;
}

// Applies the current suggestion of the given class, else the op it had in the first ranking.
void apply_class(session::Session& s, const std::string& kind, const dsl::WranglingOp& fallback) {
    for (const auto& x : s.suggestions())
        if (is_expected_op(x.op, kind)) {
            s.apply(x.id, s.generation());
            return;
        }
    s.apply_op(fallback);
}

// 1: F1 end to end.
Outcome criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    auto s = f1_session(fixture("f1_gps.csv"));
    if (s->suggestions().size() != 4) return {false, fmt::format("{} suggestions", s->suggestions().size())};
    std::map<std::string, dsl::WranglingOp> by_class;
    for (const auto& x : s->suggestions())
        for (const char* k : {"impute", "downsample", "round", "upsample"})
            if (is_expected_op(x.op, k)) by_class.emplace(k, x.op);
    if (by_class.size() != 4) return {false, "operator classes differ from the expected four"};

    for (const char* k : {"impute", "upsample", "round", "downsample"}) apply_class(*s, k, by_class.at(k));
    const auto j = s->join({"RF", "GPS", {}, session::JoinKind::Inner, ""});
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // Expected cells: (second, frequency) of the raw RF rows inside the seconds both tables span.
    const Table rf = ingest_csv(fixture("f1_rf.csv"), "RF");
    const Table gps = ingest_csv(fixture("f1_gps.csv"), "GPS");
    auto span = [](const Table& t) {
        std::int64_t lo = INT64_MAX, hi = INT64_MIN;
        for (const auto& c : t.column("timestamp").cells) {
            lo = std::min(lo, fdiv(c.as_timestamp().ns, k_sec));
            hi = std::max(hi, fdiv(c.as_timestamp().ns, k_sec));
        }
        return std::pair{lo, hi};
    };
    const auto [rlo, rhi] = span(rf);
    const auto [glo, ghi] = span(gps);
    std::set<std::pair<std::int64_t, std::string>> expected;
    for (std::size_t r = 0; r < rf.row_count(); ++r) {
        const auto sec = fdiv(rf.column("timestamp").cells[r].as_timestamp().ns, k_sec);
        if (sec >= std::max(rlo, glo) && sec <= std::min(rhi, ghi))
            expected.insert({sec, rf.column("frequency").cells[r].to_string()});
    }
    std::set<std::pair<std::int64_t, std::string>> got;
    const Table& out = j.result.table;
    for (std::size_t r = 0; r < out.row_count(); ++r) {
        const auto& ts = out.column("timestamp").cells[r];
        if (ts.as_timestamp().ns % k_sec != 0) return {false, "joined timestamp off the 1 s grid"};
        got.insert({ts.as_timestamp().ns / k_sec, out.column("frequency").cells[r].to_string()});
    }
    const bool ok = got == expected && got.size() == out.row_count() && null_count(out) == 0 && elapsed < 5.0;
    return {ok, fmt::format("{} joined rows, {} expected (second, frequency) cells, {} nulls, {:.3f} s", out.row_count(),
                            expected.size(), null_count(out), elapsed)};
}

// 2: log_mean against a linear-domain computation.
Outcome criterion_2() {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> len(1, 16);
    std::uniform_real_distribution<double> dbm(-140.0, -40.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> v(static_cast<std::size_t>(len(rng)));
        for (auto& x : v) x = dbm(rng);
        long double mw = 0;
        for (double x : v) mw += std::pow(10.0L, static_cast<long double>(x) / 10.0L);
        const double expect = static_cast<double>(10.0L * std::log10(mw / static_cast<long double>(v.size())));
        worst = std::max(worst, std::fabs(dsl::log_mean(v) - expect));
    }
    const double pair = dsl::log_mean({-80.0, -90.0});
    const bool ok = worst <= 1e-9 && std::fabs(pair - (-82.5964)) <= 1e-4;
    return {ok, fmt::format("max deviation {:.2e} over 1000 vectors, log_mean(-80, -90) = {:.4f}", worst, pair)};
}

// 3: EARFCN casts.
Outcome criterion_3() {
    const auto& bands = dsl::BandTable::shipped();
    // F_DL = F_DL_low + 0.1 (N_DL - N_Offs-DL), constants of bands 2, 71 and 1.
    struct Case {
        std::int64_t earfcn;
        double f_low, n_offs;
    };
    std::string detail;
    bool ok = true;
    for (const Case c : {Case{800, 1930.0, 600}, Case{68661, 617.0, 68586}, Case{0, 2110.0, 0}}) {
        const double expect = c.f_low + 0.1 * (static_cast<double>(c.earfcn) - c.n_offs);
        const Cell got = dsl::cast_value(Cell::integer(c.earfcn), UnitKind::EARFCN, UnitKind::MHz, bands);
        const double mhz = got.as_double().value_or(NAN);
        ok = ok && std::fabs(mhz - expect) <= 0.05;
        detail += fmt::format("{} -> {} MHz; ", c.earfcn, format_number(mhz));
    }
    std::size_t boundaries = 0;
    for (const auto& e : bands.entries())
        for (std::int64_t n : {e.earfcn_low, e.earfcn_high}) {
            ++boundaries;
            const Cell mhz = dsl::cast_value(Cell::integer(n), UnitKind::EARFCN, UnitKind::MHz, bands, e.band);
            const Cell back = dsl::cast_value(mhz, UnitKind::MHz, UnitKind::EARFCN, bands, e.band);
            if (back.kind() != CellKind::Integer || back.as_integer() != n) {
                ok = false;
                detail += fmt::format("band {} boundary {} came back as {}; ", e.band, n, back.to_string());
            }
        }
    detail += fmt::format("{} boundary values round-tripped", boundaries);
    return {ok, detail};
}

// 4: violation degree on random tables, and the post-operator re-check.
Outcome criterion_4() {
    std::mt19937_64 rng(4);
    const std::int64_t base = 1'704'110'400LL * k_sec;  // 2024-01-01T12:00:00Z
    std::size_t mismatches = 0, dup_left = 0, missing_left = 0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
        const int groups = std::uniform_int_distribution<int>(0, 3)(rng);
        const std::int64_t span_ms = std::uniform_int_distribution<std::int64_t>(1, static_cast<std::int64_t>(rows) * 2)(rng) * 1000;
        std::vector<std::int64_t> ms(rows);
        for (auto& m : ms) m = std::uniform_int_distribution<std::int64_t>(0, span_ms)(rng);
        std::sort(ms.begin(), ms.end());
        std::string csv = groups ? "timestamp,channel,value\n" : "timestamp,value\n";
        for (std::size_t r = 0; r < rows; ++r) {
            csv += format_iso8601_ms(Timestamp{base + ms[r] * 1'000'000});
            if (groups) csv += fmt::format(",ch{}", std::uniform_int_distribution<int>(0, groups - 1)(rng));
            if (std::uniform_int_distribution<int>(0, 9)(rng) == 0)
                csv += ",\n";
            else
                csv += fmt::format(",{}\n", std::uniform_int_distribution<int>(-120, -60)(rng));
        }
        const Table t = ingest_csv(csv, "T");
        const std::vector<std::string> grouping = groups ? std::vector<std::string>{"channel"} : std::vector<std::string>{};
        const constraints::TemporalFD tfd{"R", "T", Duration::from_seconds(1), "timestamp", grouping, {"value"}};
        const auto r = constraints::violation_degree(t, tfd);
        const auto o = oracle_tfd(t, "timestamp", grouping, {"value"}, k_sec);
        if (static_cast<std::int64_t>(r.total_degree) != o.total || static_cast<std::int64_t>(r.duplicates) != o.duplicates ||
            static_cast<std::int64_t>(r.missing_buckets) != o.missing)
            ++mismatches;

        const dsl::Downsample down{"T", "timestamp", Duration::from_seconds(1), grouping, {{"value", AggFn::Mean}}};
        const Table d = dsl::apply(down, t).table;
        if (oracle_tfd(d, "timestamp", grouping, {"value"}, k_sec).duplicates != 0) ++dup_left;

        const dsl::Upsample up{"T", "timestamp", Duration::from_seconds(1), grouping, {{"value", ImputeFn{}}}};
        const Table u = dsl::apply(up, t).table;
        if (oracle_tfd(u, "timestamp", grouping, {"value"}, k_sec).missing != 0) ++missing_left;
    }
    const bool ok = mismatches == 0 && dup_left == 0 && missing_left == 0;
    return {ok, fmt::format("500 tables: {} degree mismatches, {} with duplicates after downsample, {} with gaps after upsample",
                            mismatches, dup_left, missing_left)};
}

// 5: budget filter and determinism.
Outcome criterion_5() {
    auto s = f1_session(fixture("f1_gps.csv"));
    suggest::BudgetPolicy wide{Rational{1, 1}, 100};
    s->set_policy(wide);
    const auto all = s->suggestions();
    bool ok = !all.empty();
    std::string detail;
    for (const auto& x : all) ok = ok && x.score > 0;

    // Lower p just under each distinct row fraction in turn.
    std::set<Rational> fractions;
    for (const auto& x : all) fractions.insert(x.side_effect.row_fraction());
    for (const auto& f : fractions) {
        const Rational p{f.num() * 1000 - 1, f.den() * 1000};
        s->set_policy({p, 100});
        std::set<std::string> kept;
        for (const auto& x : s->suggestions()) {
            ok = ok && x.score > 0 && !(p < x.side_effect.row_fraction());
            kept.insert(dsl::render_op(x.op));
        }
        for (const auto& x : all) {
            const bool fits = !(p < x.side_effect.row_fraction());
            if (fits != kept.contains(dsl::render_op(x.op))) {
                ok = false;
                detail += fmt::format("p={} mishandled {}; ", p.to_string(), dsl::render_op(x.op));
            }
        }
    }

    std::set<std::string> runs;
    for (int i = 0; i < 10; ++i) runs.insert(f1_session(fixture("f1_gps.csv"))->suggestions_json().dump());
    ok = ok && runs.size() == 1;
    detail += fmt::format("{} suggestions checked at {} budgets, {} distinct ranking(s) over 10 runs", all.size(),
                          fractions.size(), runs.size());
    return {ok, detail};
}

// 6: delta detection against hand enumeration.
Outcome criterion_6() {
    const std::int64_t base = 1'704'110'400LL * k_sec;
    auto make = [&](const std::string& name, std::size_t n, std::int64_t step_ms, std::int64_t jitter_ms, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::string csv = "timestamp,RSRP\n";
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t j = jitter_ms ? std::uniform_int_distribution<std::int64_t>(-jitter_ms, jitter_ms)(rng) : 0;
            csv += format_iso8601_ms(Timestamp{base + (static_cast<std::int64_t>(i) * step_ms + 1000 + j) * 1'000'000});
            csv += fmt::format(",{}\n", -80 - static_cast<int>(i % 7));
        }
        return ingest_csv(csv, name);
    };
    const Table jitter = make("A", 120, 1000, 100, 6);
    const Table fast = make("B", 600, 100, 0, 6);
    const auto candidates = constraints::default_delta_candidates();

    // Argmin of summed V / (buckets x keys); ties go to the larger delta.
    auto enumerate = [&](const std::vector<const Table*>& ts) {
        Duration best;
        double best_score = INFINITY;
        for (const auto& d : candidates) {
            double score = 0;
            for (const auto* t : ts) {
                const auto o = oracle_tfd(*t, "timestamp", {}, {"RSRP"}, d.ns());
                score += static_cast<double>(o.total) / static_cast<double>(o.buckets * std::max<std::int64_t>(o.keys, 1));
            }
            if (score <= best_score) {
                best = d;
                best_score = score;
            }
        }
        return best;
    };
    auto detect = [&](const std::vector<const Table*>& ts) {
        std::vector<constraints::DeltaProbe> probes;
        for (const auto* t : ts) probes.push_back({t, "timestamp", {}, {"RSRP"}});
        return constraints::detect_delta(probes, candidates).chosen;
    };
    const Duration a = detect({&jitter}), b = detect({&fast}), ab = detect({&jitter, &fast});
    const Duration oab = enumerate({&jitter, &fast});
    const bool ok = a == Duration::from_seconds(1) && b == Duration::from_millis(100) && ab == oab &&
                    enumerate({&jitter}) == a && enumerate({&fast}) == b;
    return {ok, fmt::format("1 Hz jittered -> {}, 10 Hz -> {}, mixed -> {} (enumeration: {})", format_duration(a),
                            format_duration(b), format_duration(ab), format_duration(oab))};
}

// 7: join retention with 30% of the GPS rows removed.
Outcome criterion_7() {
    const Table gps_full = ingest_csv(fixture("f1_gps.csv"), "GPS");
    const Table rf_raw = ingest_csv(fixture("f1_rf.csv"), "RF");
    auto second_of = [](const Cell& c) { return fdiv(c.as_timestamp().ns, k_sec); };

    // Remove 30% of the GPS rows, chosen among the rows strictly inside the RF time range.
    std::int64_t rf_lo = INT64_MAX, rf_hi = INT64_MIN;
    for (const auto& c : rf_raw.column("timestamp").cells) {
        rf_lo = std::min(rf_lo, second_of(c));
        rf_hi = std::max(rf_hi, second_of(c));
    }
    std::vector<std::size_t> interior;
    for (std::size_t r = 0; r < gps_full.row_count(); ++r) {
        const auto s = second_of(gps_full.column("timestamp").cells[r]);
        if (s > rf_lo && s < rf_hi) interior.push_back(r);
    }
    const std::size_t drop = (gps_full.row_count() * 3 + 9) / 10;
    std::mt19937_64 rng(7);
    std::shuffle(interior.begin(), interior.end(), rng);
    std::set<std::size_t> dropped(interior.begin(), interior.begin() + static_cast<std::ptrdiff_t>(std::min(drop, interior.size())));
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < gps_full.row_count(); ++r)
        if (!dropped.contains(r)) keep.push_back(r);
    const Table gps = gps_full.select_rows(keep);

    // Factor by construction: the wrangled join has one row per (second, frequency)
    // over the overlap; the naive one keeps each non-null RF row whose second still has a fix.
    std::set<std::int64_t> gps_seconds;
    std::int64_t g_lo = INT64_MAX, g_hi = INT64_MIN;
    for (const auto& c : gps.column("timestamp").cells) {
        gps_seconds.insert(second_of(c));
        g_lo = std::min(g_lo, second_of(c));
        g_hi = std::max(g_hi, second_of(c));
    }
    std::set<std::pair<std::int64_t, std::string>> cells;
    std::size_t naive_expected = 0;
    for (std::size_t r = 0; r < rf_raw.row_count(); ++r) {
        const auto s = second_of(rf_raw.column("timestamp").cells[r]);
        if (s >= g_lo && s <= g_hi) cells.insert({s, rf_raw.column("frequency").cells[r].to_string()});
        if (!rf_raw.column("RSRP").cells[r].is_null() && gps_seconds.contains(s)) ++naive_expected;
    }
    const double constructed = static_cast<double>(cells.size()) / static_cast<double>(naive_expected);

    // Wrangled: the four suggested operator classes. The gaps push the upsample past
    // the default budget, so the whole range is allowed here.
    auto s = f1_session(export_csv(gps));
    s->set_policy({Rational{1, 1}, 100});
    std::map<std::string, dsl::WranglingOp> by_class;
    for (const auto& x : s->suggestions())
        for (const char* k : {"impute", "downsample", "round", "upsample"})
            if (is_expected_op(x.op, k)) by_class.emplace(k, x.op);
    if (by_class.size() != 4) return {false, fmt::format("only {} of the four operator classes suggested", by_class.size())};
    for (const char* k : {"impute", "upsample", "round", "downsample"}) apply_class(*s, k, by_class.at(k));
    const auto wrangled = s->join({"RF", "GPS", {}, session::JoinKind::Inner, ""}).result.table;

    // Naive: floor timestamps, drop rows with nulls, join.
    const Table rf_round = dsl::apply(dsl::Round{"RF", "timestamp", Duration::from_seconds(1), std::nullopt}, rf_raw).table;
    const Table rf_clean = dsl::apply(dsl::DropRow{"RF", dsl::DropRow::Predicate::NullIn, "RSRP"}, rf_round).table;
    const Table gps_round = dsl::apply(dsl::Round{"GPS", "timestamp", Duration::from_seconds(1), std::nullopt}, gps).table;
    const Table naive = session::join_tables(rf_clean, gps_round, {{"timestamp", "timestamp"}}, session::JoinKind::Inner, "N").table;

    const double factor = static_cast<double>(wrangled.row_count()) / static_cast<double>(naive.row_count());
    const bool matches_construction = wrangled.row_count() == cells.size() && naive.row_count() == naive_expected;
    const bool ok = matches_construction && null_count(wrangled) == 0 && factor >= 2.0;
    return {ok, fmt::format("{} of {} GPS rows removed; wrangled {} rows, naive {} rows, factor {:.3f} "
                            "(constructed {:.3f}; required >= 2)",
                            dropped.size(), gps_full.row_count(), wrangled.row_count(), naive.row_count(), factor,
                            constructed)};
}

// 8: CLI replay of the session script.
Outcome criterion_8() {
    const fs::path dir = fs::temp_directory_path() / fmt::format("rfw_accept_{}", ::getpid());
    fs::remove_all(dir);
    fs::create_directories(dir / "out");
    struct Case {
        std::string left_name, left_file, right_name, right_file;
    };
    bool ok = true;
    std::string detail;
    for (const Case& c : {Case{"RF", "f1_rf.csv", "GPS", "f1_gps.csv"}, Case{"RF", "f2_rf.csv", "Cells", "f2_cells.csv"}}) {
        session::Session s("replay", nullptr);
        s.upload_table(c.left_name, fixture(c.left_file));
        s.upload_table(c.right_name, fixture(c.right_file));
        s.run_pipeline();
        s.set_policy({Rational{1, 1}, 4});
        for (int i = 0; i < 6 && !s.suggestions().empty(); ++i) s.apply("W1", s.generation());
        const fs::path script = dir / "script.txt";
        std::ofstream(script, std::ios::binary) << s.script();
        const std::string cmd = fmt::format("\"{}\" apply {}={} {}={} --script \"{}\" --out \"{}\"", RFW_CLI_PATH, c.left_name,
                                            (fs::path(RFW_FIXTURE_DIR) / c.left_file).string(), c.right_name,
                                            (fs::path(RFW_FIXTURE_DIR) / c.right_file).string(), script.string(),
                                            (dir / "out").string());
        if (std::system(cmd.c_str()) != 0) return {false, "CLI replay failed: " + cmd};
        for (const auto& name : {c.left_name, c.right_name}) {
            const bool same = read_file(dir / "out" / (name + ".csv")) == s.export_table(name);
            ok = ok && same;
            detail += fmt::format("{}:{} {}; ", c.left_file.substr(0, 2), name, same ? "identical" : "DIFFERENT");
        }
        detail += fmt::format("{} ops; ", s.history().size());
    }
    fs::remove_all(dir);
    return {ok, detail};
}

}  // namespace

// No argument runs every criterion; "N" runs criterion N only.
int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"end-to-end F1 suggestions, applies and join", criterion_1},
        {"log_mean against linear-domain oracle", criterion_2},
        {"EARFCN casts and band boundary round trip", criterion_3},
        {"violation degree on random tables", criterion_4},
        {"budget filtering and ranking determinism", criterion_5},
        {"delta detection", criterion_6},
        {"join retention with GPS gaps", criterion_7},
        {"CLI replay byte-identical exports", criterion_8},
    };
    std::size_t only = 0;
    if (argc > 1) only = std::strtoul(argv[1], nullptr, 10);
    if (argc > 1 && (only < 1 || only > criteria.size())) {
        std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
        return 2;
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && i + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        failures += !o.pass;
        std::cout << fmt::format("{} {} {}: {}", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail) << std::endl;
    }
    return failures;
}
