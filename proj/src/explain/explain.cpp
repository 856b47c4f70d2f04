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

#include "rfw/explain/explain.hpp"

#include <algorithm>

#include <fmt/args.h>
#include <fmt/format.h>

#include "rfw/core/error.hpp"
#include "rfw/dsl/script.hpp"

namespace rfw::resources {
std::string_view explain_templates_conf();
}

namespace rfw::explain {

using constraints::Constraint;
using constraints::ViolationReport;
using Args = std::vector<std::pair<std::string, std::string>>;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view impute_key(ImputeKind k) {
    switch (k) {
        case ImputeKind::ForwardFill: return "ffill";
        case ImputeKind::BackwardFill: return "bfill";
        case ImputeKind::Interpolate: return "interpolate";
        case ImputeKind::Mode: return "mode";
        case ImputeKind::Constant: return "constant";
    }
    return "ffill";
}

// "A", "A and B", "A, B and C"
std::string and_list(const std::vector<std::string>& v) {
    if (v.empty()) return {};
    std::string out = v.front();
    for (std::size_t i = 1; i < v.size(); ++i) out += (i + 1 == v.size() ? " and " : ", ") + v[i];
    return out;
}

class Writer {
public:
    explicit Writer(const Templates& t) : tpl_(t) {}

    // Records a value that ends up in the text.
    std::string fact(const std::string& kind, std::string value) {
        const Fact f{kind, value};
        if (std::find(facts_.begin(), facts_.end(), f) == facts_.end()) facts_.push_back(f);
        return value;
    }
    std::string render(std::string_view key, const Args& args) const { return tpl_.render(key, args); }
    bool has(std::string_view key) const { return tpl_.has(key); }
    std::vector<Fact> take() { return std::move(facts_); }

private:
    const Templates& tpl_;
    std::vector<Fact> facts_;
};

const profiler::SemanticProfile* profile_of(const profiler::ProfileCatalog& cat, const std::string& table,
                                            const std::string& column) {
    auto it = cat.find(table);
    return it == cat.end() ? nullptr : it->second.find(column);
}

std::string predicate_text(Writer& w, const dsl::DropRow& d) {
    const std::string col = w.fact("column", d.column);
    switch (d.predicate) {
        case dsl::DropRow::Predicate::NullIn: return w.render("predicate.null", {{"column", col}});
        case dsl::DropRow::Predicate::NotNumericIn: return w.render("predicate.not_numeric", {{"column", col}});
        case dsl::DropRow::Predicate::OutsideRange:
            return w.render("predicate.outside", {{"column", col},
                                                  {"lo", w.fact("lower_bound", format_number(d.lo))},
                                                  {"hi", w.fact("upper_bound", format_number(d.hi))}});
    }
    return {};
}

std::string brief_text(Writer& w, const suggest::Suggestion& s) {
    Args common{{"id", w.fact("id", s.id)}, {"pct", w.fact("percent", percent(s.side_effect.row_fraction()))}};
    std::vector<std::string> ids;
    for (const auto& id : s.satisfied()) ids.push_back(w.fact("constraint", id));
    common.emplace_back("satisfying", ids.empty() ? "" : w.render("clause.satisfying", {{"constraints", and_list(ids)}}));
    auto with = [&](Args extra) {
        Args a = common;
        a.insert(a.end(), extra.begin(), extra.end());
        return a;
    };

    return std::visit(
        [&](const auto& op) -> std::string {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, dsl::Cast>) {
                return w.render("brief.cast", with({{"column", w.fact("column", op.column)},
                                                    {"from_unit", w.fact("unit", unit_name(op.from))},
                                                    {"to_unit", w.fact("unit", unit_name(op.to))}}));
            } else if constexpr (std::is_same_v<T, dsl::Round>) {
                if (op.decimals)
                    return w.render("brief.round_decimals",
                                    with({{"column", w.fact("column", op.column)},
                                          {"decimals", w.fact("decimals", std::to_string(*op.decimals))}}));
                return w.render("brief.round", with({{"column", w.fact("column", op.column)},
                                                     {"delta", w.fact("delta", format_duration(*op.granularity))}}));
            } else if constexpr (std::is_same_v<T, dsl::Impute>) {
                std::string grouped;
                if (!op.group_by.empty())
                    grouped = w.render("clause.grouped", {{"group_by", w.fact("group_by", and_list(op.group_by))}});
                return w.render("brief.impute", with({{"column", w.fact("column", op.column)},
                                                      {"method", w.fact("method", std::string(describe(op.method.kind)))},
                                                      {"grouped", grouped}}));
            } else if constexpr (std::is_same_v<T, dsl::Downsample>) {
                std::string per_group;
                if (!op.group_by.empty())
                    per_group = " " + w.render("clause.per_group", {{"group_by", w.fact("group_by", and_list(op.group_by))}});
                // "log_mean on RSRP", "mean on latitude and longitude"
                std::vector<std::pair<AggFn, std::vector<std::string>>> by_fn;
                for (const auto& [col, fn] : op.agg) {
                    auto it = std::find_if(by_fn.begin(), by_fn.end(), [&](const auto& e) { return e.first == fn; });
                    if (it == by_fn.end()) by_fn.push_back({fn, {col}});
                    else it->second.push_back(col);
                }
                std::vector<std::string> parts;
                for (const auto& [fn, cols] : by_fn)
                    parts.push_back(w.fact("aggregation", std::string(to_string(fn))) + " on " + w.fact("columns", and_list(cols)));
                return w.render("brief.downsample", with({{"delta", w.fact("delta", format_duration(op.delta))},
                                                          {"per_group", per_group},
                                                          {"aggs", fmt::format("{}", fmt::join(parts, "; "))}}));
            } else if constexpr (std::is_same_v<T, dsl::Upsample>) {
                return w.render("brief.upsample", common);
            } else {
                return w.render("brief.droprow", with({{"predicate", predicate_text(w, op)}}));
            }
        },
        s.op);
}

std::string violation_parts(Writer& w, const ViolationReport& r) {
    std::vector<std::string> parts;
    auto part = [&](std::string_view name, std::size_t n, const char* kind) {
        if (n == 0) return;
        parts.push_back(w.render(fmt::format("part.{}.{}", name, n == 1 ? "one" : "other"),
                                 {{"n", w.fact(kind, std::to_string(n))}}));
    };
    part("duplicates", r.duplicates, "duplicates");
    part("missing", r.missing_buckets, "missing_buckets");
    part("nulls", r.null_cells, "null_cells");
    part("misaligned", r.misaligned_keys, "misaligned_keys");
    return and_list(parts);
}

std::vector<std::string> rationale(Writer& w, const suggest::Suggestion& s, const profiler::ProfileCatalog& profiles) {
    const std::string& table = dsl::op_table(s.op);
    std::vector<std::string> out;
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, dsl::Cast>) {
                out.push_back(w.render("rationale.cast", {{"column", w.fact("column", op.column)},
                                                          {"from_unit", w.fact("unit", unit_name(op.from))},
                                                          {"to_unit", w.fact("unit", unit_name(op.to))}}));
            } else if constexpr (std::is_same_v<T, dsl::Round>) {
                if (op.decimals)
                    out.push_back(w.render("rationale.round_decimals",
                                           {{"column", w.fact("column", op.column)},
                                            {"decimals", w.fact("decimals", std::to_string(*op.decimals))}}));
                else
                    out.push_back(w.render("rationale.round", {{"column", w.fact("column", op.column)},
                                                               {"delta", w.fact("delta", format_duration(*op.granularity))}}));
            } else if constexpr (std::is_same_v<T, dsl::Impute>) {
                std::string same;
                if (!op.group_by.empty())
                    same = " " + w.render("rationale.same_group", {{"group_by", w.fact("group_by", and_list(op.group_by))}});
                out.push_back(w.render(fmt::format("rationale.impute.{}", impute_key(op.method.kind)),
                                       {{"column", w.fact("column", op.column)}, {"same_group", same}}));
            } else if constexpr (std::is_same_v<T, dsl::Downsample>) {
                std::vector<AggFn> seen;
                for (const auto& [col, fn] : op.agg) {
                    if (std::find(seen.begin(), seen.end(), fn) != seen.end()) continue;
                    seen.push_back(fn);
                    std::vector<std::string> cols;
                    for (const auto& [c, f] : op.agg)
                        if (f == fn) cols.push_back(c);
                    const auto* p = profile_of(profiles, table, col);
                    out.push_back(w.render(fmt::format("rationale.agg.{}", to_string(fn)),
                                           {{"columns", w.fact("columns", and_list(cols))},
                                            {"unit", w.fact("unit", p ? unit_name(p->unit) : "no unit")}}));
                }
            } else if constexpr (std::is_same_v<T, dsl::Upsample>) {
                std::vector<ImputeKind> seen;
                bool positions = false;
                for (const auto& [col, fn] : op.fill) {
                    const auto* p = profile_of(profiles, table, col);
                    if (p && p->unit.kind == UnitKind::DecimalDegrees && fn.kind == ImputeKind::ForwardFill) positions = true;
                    if (std::find(seen.begin(), seen.end(), fn.kind) != seen.end()) continue;
                    seen.push_back(fn.kind);
                    std::vector<std::string> cols;
                    for (const auto& [c, f] : op.fill)
                        if (f.kind == fn.kind) cols.push_back(c);
                    const std::string key = fmt::format("rationale.fill.{}", impute_key(fn.kind));
                    if (w.has(key)) out.push_back(w.render(key, {{"columns", w.fact("columns", and_list(cols))}}));
                }
                if (positions) out.push_back(w.render("rationale.fill.position", {}));
            } else {
                out.push_back(w.render("rationale.droprow", {{"predicate", predicate_text(w, op)}}));
            }
        },
        s.op);
    return out;
}

const Constraint* find_constraint(const std::vector<Constraint>& cs, const std::string& id) {
    for (const auto& c : cs)
        if (constraints::constraint_id(c) == id) return &c;
    return nullptr;
}

const ViolationReport* find_report(const std::vector<ViolationReport>& rs, const std::string& id, const std::string& table) {
    for (const auto& r : rs)
        if (r.constraint_id == id && r.table == table) return &r;
    return nullptr;
}

std::string detailed_text(Writer& w, const suggest::Suggestion& s, const std::string& brief,
                          const std::vector<ViolationReport>& reports, const std::vector<Constraint>& constraints,
                          const profiler::ProfileCatalog& profiles) {
    const std::string& table = dsl::op_table(s.op);
    std::vector<std::string> sentences{brief + "."};

    for (const auto& g : s.gains) {
        if (g.reduction() <= 0) continue;
        const auto* c = find_constraint(constraints, g.constraint_id);
        const auto* r = find_report(reports, g.constraint_id, table);
        if (c && r) {
            const Args head{{"constraint", w.fact("constraint", g.constraint_id)},
                            {"constraint_text", w.fact("constraint_text", constraints::describe(*c))},
                            {"table", w.fact("table", table)}};
            if (r->total_degree == 0) {
                sentences.push_back(w.render("detailed.clean", head));
            } else {
                Args a = head;
                a.emplace_back("parts", violation_parts(w, *r));
                sentences.push_back(w.render("detailed.violation", a));
            }
        }
        sentences.push_back(w.render("detailed.gain", {{"constraint", w.fact("constraint", g.constraint_id)},
                                                       {"before", w.fact("degree_before", std::to_string(g.before))},
                                                       {"after", w.fact("degree_after", std::to_string(g.after))}}));
        if (r && r->missing_buckets > 0 && !r->missing_ranges.empty()) {
            sentences.push_back(w.render(
                "detailed.missing",
                {{"missing_start", w.fact("missing_start", format_iso8601_ms(r->missing_ranges.front().start))},
                 {"missing_end", w.fact("missing_end", format_iso8601_ms(r->missing_ranges.back().end))}}));
        } else if (r && r->violated_span) {
            sentences.push_back(w.render("detailed.range",
                                         {{"range_start", w.fact("range_start", format_iso8601_ms(r->violated_span->start))},
                                          {"range_end", w.fact("range_end", format_iso8601_ms(r->violated_span->end))}}));
        }
    }

    for (auto& r : rationale(w, s, profiles)) sentences.push_back(std::move(r));

    const auto& e = s.side_effect;
    sentences.push_back(w.render("detailed.effect",
                                 {{"rows_before", w.fact("sample_rows", std::to_string(e.rows_before))},
                                  {"modified", w.fact("rows_modified", std::to_string(e.rows_modified))},
                                  {"inserted", w.fact("rows_inserted", std::to_string(e.rows_inserted))},
                                  {"deleted", w.fact("rows_deleted", std::to_string(e.rows_deleted))},
                                  {"pct_detailed", w.fact("percent_detailed", percent_one_decimal(e.row_fraction()))}}));
    return fmt::format("{}", fmt::join(sentences, " "));
}

}  // namespace

nlohmann::json to_json(const Explanation& e) {
    nlohmann::json facts = nlohmann::json::array();
    for (const auto& f : e.facts) facts.push_back({{"kind", f.kind}, {"value", f.value}});
    return {{"suggestion_id", e.suggestion_id}, {"brief", e.brief}, {"detailed", e.detailed}, {"facts", facts}};
}

Depth depth_from_string(std::string_view s) {
    if (s == "brief") return Depth::Brief;
    if (s == "detailed") return Depth::Detailed;
    throw Error(ErrorCode::InvalidArgument, fmt::format("depth must be 'brief' or 'detailed', not '{}'", s));
}

const Templates& Templates::shipped() {
    static const Templates t = parse(resources::explain_templates_conf());
    return t;
}

Templates Templates::parse(std::string_view text) {
    Templates t;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty())
            throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: expected 'key = template'", line_no), line_no);
        t.entries_[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    }
    return t;
}

bool Templates::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::string Templates::render(std::string_view key, const Args& args) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw Error(ErrorCode::ConfigSyntax, fmt::format("no template named '{}'", key));
    fmt::dynamic_format_arg_store<fmt::format_context> store;
    for (const auto& [name, value] : args) store.push_back(fmt::arg(name.c_str(), value));
    try {
        return fmt::vformat(it->second, store);
    } catch (const fmt::format_error& e) {
        throw Error(ErrorCode::ConfigSyntax, fmt::format("template '{}': {}", key, e.what()));
    }
}

std::string percent(const Rational& r) {
    if (r.den() == 0) return "0";
    return std::to_string((200 * r.num() + r.den()) / (2 * r.den()));
}

std::string percent_one_decimal(const Rational& r) {
    if (r.den() == 0) return "0.0";
    const std::int64_t tenths = (2000 * r.num() + r.den()) / (2 * r.den());
    return fmt::format("{}.{}", tenths / 10, tenths % 10);
}

Explanation explain(const suggest::Suggestion& s, const std::vector<ViolationReport>& reports,
                    const std::vector<Constraint>& constraints, const profiler::ProfileCatalog& profiles,
                    const Templates& templates) {
    Writer w(templates);
    Explanation e;
    e.suggestion_id = s.id;
    e.brief = brief_text(w, s);
    e.detailed = detailed_text(w, s, e.brief, reports, constraints, profiles);
    e.facts = w.take();
    return e;
}

std::string explain_brief(const suggest::Suggestion& s, const std::vector<ViolationReport>&, const Templates& templates) {
    Writer w(templates);
    return brief_text(w, s);
}

std::string explain_detailed(const suggest::Suggestion& s, const std::vector<ViolationReport>& reports,
                             const std::vector<Constraint>& constraints, const profiler::ProfileCatalog& profiles,
                             const Templates& templates) {
    return explain(s, reports, constraints, profiles, templates).detailed;
}

}  // namespace rfw::explain
