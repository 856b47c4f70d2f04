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

#include "rfw/constraints/constraints.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "rfw/core/error.hpp"
#include "rfw/core/sampling.hpp"

namespace rfw::constraints {
namespace {

struct KeyLess {
    bool operator()(const std::vector<Cell>& a, const std::vector<Cell>& b) const {
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
            const auto c = compare_cells(a[i], b[i]);
            if (c != 0) return c < 0;
        }
        return a.size() < b.size();
    }
};

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

// Merges [start, end] bucket ranges (in bucket indices) that overlap or touch.
std::vector<std::pair<std::int64_t, std::int64_t>> merge_runs(std::vector<std::pair<std::int64_t, std::int64_t>> runs) {
    std::sort(runs.begin(), runs.end());
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& r : runs) {
        if (!out.empty() && r.first <= out.back().second + 1)
            out.back().second = std::max(out.back().second, r.second);
        else
            out.push_back(r);
    }
    return out;
}

}  // namespace

const std::string& constraint_id(const Constraint& c) {
    return std::visit([](const auto& x) -> const std::string& { return x.id; }, c);
}

std::vector<std::string> constraint_tables(const Constraint& c) {
    if (const auto* tfd = std::get_if<TemporalFD>(&c)) return {tfd->table};
    const auto& k = std::get<KeyAlignment>(c);
    if (k.left_table == k.right_table) return {k.left_table};
    return {k.left_table, k.right_table};
}

std::string describe(const Constraint& c) {
    if (const auto* tfd = std::get_if<TemporalFD>(&c)) {
        std::string lhs = format_duration(tfd->delta);
        for (const auto& g : tfd->grouping) lhs += ", " + g;
        return fmt::format("{}: [{}] -> {}", tfd->table, lhs, join_names(tfd->determined));
    }
    const auto& k = std::get<KeyAlignment>(c);
    if (k.kind == KeyAlignment::Kind::TimeGrid)
        return fmt::format("{}.{} ~ {}.{} on a {} grid", k.left_table, k.left_column, k.right_table, k.right_column,
                           format_duration(k.delta));
    return fmt::format("{}.{} ~ {}.{} in {}", k.left_table, k.left_column, k.right_table, k.right_column,
                       unit_name(k.target_unit));
}

ViolationReport violation_degree(const Table& t, const TemporalFD& tfd) {
    ViolationReport r;
    r.constraint_id = tfd.id;
    r.table = t.name();

    const std::size_t time_idx = t.column_index(tfd.time_column);
    std::vector<std::size_t> group_idx, det_idx;
    for (const auto& g : tfd.grouping) group_idx.push_back(t.column_index(g));
    for (const auto& d : tfd.determined) det_idx.push_back(t.column_index(d));
    if (!is_sorted_by_time(t, tfd.time_column))
        throw Error(ErrorCode::UnsortedTable, fmt::format("table '{}' is not sorted by '{}'", t.name(), tfd.time_column));

    const auto& times = t.columns()[time_idx].cells;
    const std::int64_t d = tfd.delta.ns();
    std::optional<std::int64_t> lo, hi;
    for (const auto& c : times) {
        if (c.kind() != CellKind::Timestamp) continue;
        const std::int64_t b = floor_to(c.as_timestamp().ns, d);
        lo = lo ? std::min(*lo, b) : b;
        hi = hi ? std::max(*hi, b) : b;
    }
    if (!lo) return r;
    r.grid_start = Timestamp{*lo};
    r.grid_end = Timestamp{*hi};
    const std::int64_t bucket_count = (*hi - *lo) / d + 1;

    // key -> bucket index -> rows
    std::map<std::vector<Cell>, std::map<std::int64_t, std::vector<std::size_t>>, KeyLess> cells;
    for (std::size_t row = 0; row < t.row_count(); ++row) {
        if (times[row].kind() != CellKind::Timestamp) continue;
        std::vector<Cell> key;
        key.reserve(group_idx.size());
        for (auto gi : group_idx) key.push_back(t.at(row, gi));
        const std::int64_t bucket = (floor_to(times[row].as_timestamp().ns, d) - *lo) / d;
        cells[std::move(key)][bucket].push_back(row);
    }

    std::optional<std::int64_t> first_bad, last_bad;
    auto mark = [&](std::int64_t a, std::int64_t b) {
        first_bad = first_bad ? std::min(*first_bad, a) : a;
        last_bad = last_bad ? std::max(*last_bad, b) : b;
    };
    std::vector<std::pair<std::int64_t, std::int64_t>> gaps;
    r.key_count = cells.size();
    for (const auto& [key, buckets] : cells) {
        r.missing_buckets += static_cast<std::size_t>(bucket_count) - buckets.size();
        std::int64_t expected = 0;
        for (const auto& [bucket, rows] : buckets) {
            if (bucket > expected) gaps.emplace_back(expected, bucket - 1);
            expected = bucket + 1;
            std::size_t nulls = 0;
            for (auto row : rows)
                for (auto di : det_idx)
                    if (t.at(row, di).is_null()) ++nulls;
            r.duplicates += rows.size() - 1;
            r.null_cells += nulls;
            if (rows.size() > 1 || nulls > 0) {
                r.flagged_rows.insert(r.flagged_rows.end(), rows.begin(), rows.end());
                mark(bucket, bucket);
            }
        }
        if (expected < bucket_count) gaps.emplace_back(expected, bucket_count - 1);
    }
    for (const auto& [a, b] : merge_runs(std::move(gaps))) {
        r.missing_ranges.push_back(TimeRange{Timestamp{*lo + a * d}, Timestamp{*lo + b * d}});
        mark(a, b);
    }
    std::sort(r.flagged_rows.begin(), r.flagged_rows.end());
    r.total_degree = r.duplicates + r.missing_buckets + r.null_cells;
    if (first_bad) r.violated_span = TimeRange{Timestamp{*lo + *first_bad * d}, Timestamp{*lo + *last_bad * d}};
    return r;
}

UnitResolver profile_unit_resolver(const profiler::ProfileCatalog& profiles) {
    return [&profiles](const Table& t, std::string_view column) -> Unit {
        const Column& c = t.column(column);
        if (c.declared_unit) return *c.declared_unit;
        if (auto it = profiles.find(t.name()); it != profiles.end())
            if (const auto* p = it->second.find(column)) return p->unit;
        return Unit{};
    };
}

ViolationReport alignment_degree(const Table& t, const KeyAlignment& c, const UnitResolver& units) {
    ViolationReport r;
    r.constraint_id = c.id;
    r.table = t.name();
    std::vector<std::string> sides;
    if (t.name() == c.left_table) sides.push_back(c.left_column);
    if (t.name() == c.right_table && (c.right_table != c.left_table || c.right_column != c.left_column))
        sides.push_back(c.right_column);

    std::optional<std::int64_t> first, last;
    for (const auto& column : sides) {
        const Column& col = t.column(column);
        if (c.kind == KeyAlignment::Kind::TimeGrid) {
            const std::int64_t d = c.delta.ns();
            for (std::size_t row = 0; row < col.cells.size(); ++row) {
                const Cell& cell = col.cells[row];
                if (cell.is_null()) continue;
                if (cell.kind() == CellKind::Timestamp) {
                    const std::int64_t ns = cell.as_timestamp().ns;
                    const std::int64_t b = floor_to(ns, d);
                    if (b == ns) continue;
                    first = first ? std::min(*first, b) : b;
                    last = last ? std::max(*last, b) : b;
                }
                ++r.misaligned_keys;
                r.flagged_rows.push_back(row);
            }
        } else if (!(units(t, column) == c.target_unit)) {
            for (std::size_t row = 0; row < col.cells.size(); ++row) {
                if (col.cells[row].is_null()) continue;
                ++r.misaligned_keys;
                r.flagged_rows.push_back(row);
            }
        }
    }
    std::sort(r.flagged_rows.begin(), r.flagged_rows.end());
    r.flagged_rows.erase(std::unique(r.flagged_rows.begin(), r.flagged_rows.end()), r.flagged_rows.end());
    if (first) r.violated_span = TimeRange{Timestamp{*first}, Timestamp{*last}};
    r.total_degree = r.misaligned_keys;
    return r;
}

ViolationReport evaluate(const Table& t, const Constraint& c, const UnitResolver& units) {
    if (const auto* tfd = std::get_if<TemporalFD>(&c)) {
        if (tfd->table != t.name()) {
            ViolationReport r;
            r.constraint_id = tfd->id;
            r.table = t.name();
            return r;
        }
        return violation_degree(t, *tfd);
    }
    return alignment_degree(t, std::get<KeyAlignment>(c), units);
}

std::string_view to_string(JoinProposal::Relation r) {
    switch (r) {
        case JoinProposal::Relation::SameUnit: return "same_unit";
        case JoinProposal::Relation::ScaleConvertible: return "scale_convertible";
        case JoinProposal::Relation::CastConvertible: return "cast_convertible";
    }
    return "same_unit";
}

namespace {

bool unordered_pair(UnitKind a, UnitKind b, UnitKind x, UnitKind y) { return (a == x && b == y) || (a == y && b == x); }

}  // namespace

std::vector<JoinProposal> propose_joins(const std::vector<const Table*>& tables,
                                        const profiler::ProfileCatalog& profiles) {
    const UnitResolver units = profile_unit_resolver(profiles);
    auto confidence = [&](const Table& t, const std::string& column) {
        if (auto it = profiles.find(t.name()); it != profiles.end())
            if (const auto* p = it->second.find(column)) return p->confidence;
        return 1.0;
    };

    std::vector<JoinProposal> out;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        for (std::size_t j = i + 1; j < tables.size(); ++j) {
            const Table& a = *tables[i];
            const Table& b = *tables[j];
            for (const auto& ca : a.columns()) {
                const Unit ua = units(a, ca.name);
                if (ua.kind == UnitKind::NoUnit) continue;
                for (const auto& cb : b.columns()) {
                    const Unit ub = units(b, cb.name);
                    if (ub.kind == UnitKind::NoUnit) continue;
                    const bool ta = ca.type == ColumnType::Timestamp, tb = cb.type == ColumnType::Timestamp;
                    if (ta != tb) continue;

                    JoinProposal p;
                    p.left_table = a.name();
                    p.left_column = ca.name;
                    p.right_table = b.name();
                    p.right_column = cb.name;
                    if (ua == ub) {
                        p.relation = JoinProposal::Relation::SameUnit;
                    } else if (unordered_pair(ua.kind, ub.kind, UnitKind::Seconds, UnitKind::Milliseconds) ||
                               unordered_pair(ua.kind, ub.kind, UnitKind::Hz, UnitKind::MHz)) {
                        p.relation = JoinProposal::Relation::ScaleConvertible;
                        p.required_cast = std::make_pair(ub, ua);
                    } else if (unordered_pair(ua.kind, ub.kind, UnitKind::EARFCN, UnitKind::MHz) ||
                               unordered_pair(ua.kind, ub.kind, UnitKind::Hexadecimal, UnitKind::Decimal)) {
                        p.relation = JoinProposal::Relation::CastConvertible;
                        p.required_cast = std::make_pair(ub, ua);
                    } else {
                        continue;
                    }
                    p.confidence = std::min(confidence(a, ca.name), confidence(b, cb.name));
                    out.push_back(std::move(p));
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const JoinProposal& x, const JoinProposal& y) {
        if (x.relation != y.relation) return x.relation < y.relation;
        return x.confidence > y.confidence;
    });
    return out;
}

std::optional<KeyAlignment> alignment_for(const JoinProposal& p, const Table& left, const Table& right,
                                          Duration delta, std::string id) {
    KeyAlignment k;
    k.id = std::move(id);
    k.left_table = p.left_table;
    k.left_column = p.left_column;
    k.right_table = p.right_table;
    k.right_column = p.right_column;
    k.delta = delta;
    if (left.column(p.left_column).type == ColumnType::Timestamp &&
        right.column(p.right_column).type == ColumnType::Timestamp) {
        k.kind = KeyAlignment::Kind::TimeGrid;
        return k;
    }
    if (p.required_cast) {
        k.kind = KeyAlignment::Kind::UnitMatch;
        k.target_unit = p.required_cast->second;
        return k;
    }
    return std::nullopt;
}

std::vector<Duration> default_delta_candidates() {
    return {Duration::from_millis(1),   Duration::from_millis(10), Duration::from_millis(100),
            Duration::from_seconds(1),  Duration::from_seconds(10), Duration::from_seconds(60)};
}

DeltaDetection detect_delta(const std::vector<DeltaProbe>& probes, const std::vector<Duration>& candidates) {
    if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no delta candidates");

    std::vector<const DeltaProbe*> voting;
    for (const auto& p : probes) {
        const Column& col = p.table->column(p.time_column);
        const auto timed = std::count_if(col.cells.begin(), col.cells.end(),
                                         [](const Cell& c) { return c.kind() == CellKind::Timestamp; });
        if (timed >= 2) voting.push_back(&p);
    }
    if (voting.empty()) throw Error(ErrorCode::AllTablesSingleRow, "every table has fewer than two timed rows");

    DeltaDetection out;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double score = 0;
        for (const auto* p : voting) {
            TemporalFD tfd{"probe", p->table->name(), candidates[i], p->time_column, p->grouping, p->determined};
            const ViolationReport r = violation_degree(*p->table, tfd);
            const double buckets =
                static_cast<double>((r.grid_end->ns - r.grid_start->ns) / candidates[i].ns() + 1);
            const auto keys = std::max<std::size_t>(r.key_count, 1);
            score += static_cast<double>(r.total_degree) / (buckets * static_cast<double>(keys));
        }
        out.scores.push_back(DeltaScore{candidates[i], score});
        if (!best || score < out.scores[*best].score ||
            (score == out.scores[*best].score && candidates[i] > candidates[*best]))
            best = i;
    }
    out.chosen = candidates[*best];
    return out;
}

TemporalFD synthesize_tfd(const Table& t, const profiler::TableProfiles& profiles, Duration delta, std::string id) {
    const auto* time = profiles.time_index();
    if (!time) throw Error(ErrorCode::NoTimeIndex, fmt::format("table '{}' has no time index", t.name()));
    TemporalFD tfd;
    tfd.id = std::move(id);
    tfd.table = t.name();
    tfd.delta = delta;
    tfd.time_column = time->column;
    for (const auto& p : profiles.columns) {
        if (!t.find_column(p.column)) continue;
        if (p.role == ColumnRole::Grouping) tfd.grouping.push_back(p.column);
        if (p.role == ColumnRole::Aggregating) tfd.determined.push_back(p.column);
    }
    if (tfd.determined.empty())
        throw Error(ErrorCode::NoDeterminedColumns, fmt::format("table '{}' has no aggregating columns", t.name()));
    return tfd;
}

nlohmann::json to_json(const TemporalFD& tfd) {
    return {{"id", tfd.id},
            {"kind", "tfd"},
            {"table", tfd.table},
            {"delta_ns", tfd.delta.ns()},
            {"time_column", tfd.time_column},
            {"grouping", tfd.grouping},
            {"determined", tfd.determined}};
}

TemporalFD tfd_from_json(const nlohmann::json& j) {
    try {
        TemporalFD tfd;
        tfd.id = j.value("id", std::string{});
        tfd.table = j.at("table").get<std::string>();
        tfd.delta = Duration{j.at("delta_ns").get<std::int64_t>()};
        tfd.time_column = j.at("time_column").get<std::string>();
        tfd.grouping = j.value("grouping", std::vector<std::string>{});
        tfd.determined = j.at("determined").get<std::vector<std::string>>();
        if (tfd.determined.empty()) throw Error(ErrorCode::NoDeterminedColumns, "TFD needs determined columns");
        for (const auto& g : tfd.grouping)
            if (std::find(tfd.determined.begin(), tfd.determined.end(), g) != tfd.determined.end() ||
                g == tfd.time_column)
                throw Error(ErrorCode::InvalidArgument, fmt::format("column '{}' listed twice in TFD", g));
        if (std::find(tfd.determined.begin(), tfd.determined.end(), tfd.time_column) != tfd.determined.end())
            throw Error(ErrorCode::InvalidArgument, "time column cannot be determined");
        return tfd;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("bad TFD: {}", e.what()));
    }
}

nlohmann::json to_json(const KeyAlignment& c) {
    nlohmann::json j = {{"id", c.id},
                        {"kind", c.kind == KeyAlignment::Kind::TimeGrid ? "time_grid" : "unit_match"},
                        {"left_table", c.left_table},
                        {"left_column", c.left_column},
                        {"right_table", c.right_table},
                        {"right_column", c.right_column}};
    if (c.kind == KeyAlignment::Kind::TimeGrid)
        j["delta_ns"] = c.delta.ns();
    else
        j["unit"] = unit_token(c.target_unit);
    return j;
}

KeyAlignment alignment_from_json(const nlohmann::json& j) {
    try {
        KeyAlignment c;
        c.id = j.value("id", std::string{});
        const auto kind = j.at("kind").get<std::string>();
        c.left_table = j.at("left_table").get<std::string>();
        c.left_column = j.at("left_column").get<std::string>();
        c.right_table = j.at("right_table").get<std::string>();
        c.right_column = j.at("right_column").get<std::string>();
        if (kind == "time_grid") {
            c.kind = KeyAlignment::Kind::TimeGrid;
            c.delta = Duration{j.at("delta_ns").get<std::int64_t>()};
        } else if (kind == "unit_match") {
            c.kind = KeyAlignment::Kind::UnitMatch;
            auto u = unit_from_token(j.at("unit").get<std::string>());
            if (!u) throw Error(ErrorCode::InvalidArgument, "unknown unit in key alignment");
            c.target_unit = *u;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown key alignment kind " + kind);
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("bad key alignment: {}", e.what()));
    }
}

nlohmann::json to_json(const Constraint& c) {
    return std::visit([](const auto& x) { return to_json(x); }, c);
}

Constraint constraint_from_json(const nlohmann::json& j) {
    if (j.value("kind", std::string("tfd")) == "tfd") return tfd_from_json(j);
    return alignment_from_json(j);
}

nlohmann::json to_json(const ViolationReport& r) {
    auto range = [](const TimeRange& x) {
        return nlohmann::json{{"start", format_iso8601_ms(x.start)}, {"end", format_iso8601_ms(x.end)}};
    };
    nlohmann::json j = {{"constraint_id", r.constraint_id},
                        {"table", r.table},
                        {"total_degree", r.total_degree},
                        {"duplicates", r.duplicates},
                        {"missing_buckets", r.missing_buckets},
                        {"null_cells", r.null_cells},
                        {"misaligned_keys", r.misaligned_keys},
                        {"flagged_rows", r.flagged_rows}};
    j["grid_start"] = r.grid_start ? nlohmann::json(format_iso8601_ms(*r.grid_start)) : nlohmann::json();
    j["grid_end"] = r.grid_end ? nlohmann::json(format_iso8601_ms(*r.grid_end)) : nlohmann::json();
    j["missing_ranges"] = nlohmann::json::array();
    for (const auto& m : r.missing_ranges) j["missing_ranges"].push_back(range(m));
    j["violated_span"] = r.violated_span ? range(*r.violated_span) : nlohmann::json();
    return j;
}

nlohmann::json to_json(const JoinProposal& p) {
    nlohmann::json j = {{"left", {{"table", p.left_table}, {"column", p.left_column}}},
                        {"right", {{"table", p.right_table}, {"column", p.right_column}}},
                        {"relation", to_string(p.relation)},
                        {"confidence", p.confidence}};
    j["required_cast"] = p.required_cast ? nlohmann::json{{"from", unit_token(p.required_cast->first)},
                                                          {"to", unit_token(p.required_cast->second)}}
                                         : nlohmann::json();
    return j;
}

}  // namespace rfw::constraints
