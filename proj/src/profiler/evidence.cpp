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

#include "rfw/profiler/evidence.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw::resources {
std::string_view unit_keywords_conf();
}

namespace rfw::profiler {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_hex_text(const std::string& s) {
    if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) return false;
    return std::all_of(s.begin() + 2, s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

// Splits a column name on punctuation and lower-to-upper camelCase boundaries.
std::vector<std::string> name_tokens(std::string_view name) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const auto c = static_cast<unsigned char>(name[i]);
        if (!std::isalnum(c)) {
            if (!cur.empty()) out.push_back(lower(cur));
            cur.clear();
            continue;
        }
        if (std::isupper(c) && i > 0 && std::islower(static_cast<unsigned char>(name[i - 1])) && !cur.empty()) {
            out.push_back(lower(cur));
            cur.clear();
        }
        cur.push_back(static_cast<char>(c));
    }
    if (!cur.empty()) out.push_back(lower(cur));
    return out;
}

bool keyword_matches(std::string_view column, const std::string& keyword) {
    const std::string name = lower(column);
    const std::string kw = lower(keyword);
    if (name == kw) return true;
    for (const auto& t : name_tokens(column))
        if (t == kw) return true;
    // Short keywords such as "lat" or "sec" only match whole tokens.
    return kw.size() >= 4 && name.starts_with(kw);
}

bool numeric_unit(const Unit& u) { return u.kind != UnitKind::Hexadecimal && u.kind != UnitKind::Custom; }

bool is_numeric_type(ColumnType t) { return t == ColumnType::Integer || t == ColumnType::Number; }

bool name_has_any(std::string_view column, std::initializer_list<std::string_view> words) {
    for (auto w : words)
        if (keyword_matches(column, std::string(w))) return true;
    return false;
}

std::string python_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += "'" + items[i] + "'";
    }
    return out + "]";
}

std::string render_bound(const ColumnEvidence& e, bool want_min) {
    const auto& v = want_min ? e.min : e.max;
    if (v) return format_number(*v);
    if (e.samples.empty()) return "None";
    auto it = want_min ? std::min_element(e.samples.begin(), e.samples.end())
                       : std::max_element(e.samples.begin(), e.samples.end());
    return *it;
}

std::string sample_line(const ColumnEvidence& e) {
    std::string out;
    for (std::size_t i = 0; i < e.samples.size(); ++i) {
        if (i) out += ", ";
        out += e.samples[i];
    }
    return out;
}

std::string normalize_answer(std::string_view a) {
    std::string s = trim(a);
    auto strip = [](char c) { return c == '"' || c == '\'' || c == '`' || c == '.' || c == '*'; };
    while (!s.empty() && strip(s.front())) s.erase(s.begin());
    while (!s.empty() && strip(s.back())) s.pop_back();
    return lower(trim(s));
}

}  // namespace

ColumnEvidence gather_evidence(const Table& t, std::string_view column) {
    const Column& col = t.column(column);
    ColumnEvidence e;
    e.table = t.name();
    e.name = col.name;
    e.type = col.type;
    e.row_count = t.row_count();
    e.unit = col.declared_unit;
    for (const auto& c : t.columns())
        if (c.name != col.name) e.siblings.push_back(c.name);

    std::set<std::string> distinct;
    bool all_integer = true, all_hex = true, any = false;
    for (const auto& cell : col.cells) {
        if (cell.is_null()) continue;
        any = true;
        ++e.non_null_count;
        const std::string rendered = cell.kind() == CellKind::Timestamp
                                         ? std::to_string(cell.as_timestamp().ns)
                                         : cell.to_string();
        distinct.insert(rendered);
        if (e.samples.size() < k_evidence_samples) e.samples.push_back(cell.to_string());

        std::optional<double> v = cell.as_double();
        if (cell.kind() == CellKind::Timestamp) v = static_cast<double>(cell.as_timestamp().ns) / 1e9;
        if (v) {
            e.min = e.min ? std::min(*e.min, *v) : *v;
            e.max = e.max ? std::max(*e.max, *v) : *v;
        }
        if (!(cell.is_numeric() && std::floor(*cell.as_double()) == *cell.as_double())) all_integer = false;
        if (!(cell.kind() == CellKind::Text && is_hex_text(cell.as_text()))) all_hex = false;
    }
    // Mixed columns (numbers plus stray text) report the numeric range only.
    e.distinct_count = distinct.size();
    e.all_integer = any && all_integer;
    e.all_hex = any && all_hex;
    return e;
}

KeywordConfig KeywordConfig::defaults() { return parse(resources::unit_keywords_conf()); }

KeywordConfig KeywordConfig::parse(std::string_view text) {
    KeywordConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string line(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: expected '<unit> = keywords'", line_no));
        const std::string unit_text = trim(line.substr(0, eq));
        std::string rhs = line.substr(eq + 1);
        if (unit_text.empty()) throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: empty unit name", line_no));

        UnitKeywords entry;
        entry.unit = unit_from_name(unit_text).value_or(Unit::custom_unit(unit_text));
        if (auto at = rhs.find('@'); at != std::string::npos) {
            const std::string range = trim(rhs.substr(at + 1));
            rhs.erase(at);
            const auto dots = range.find("..");
            if (dots == std::string::npos)
                throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: range must be lo..hi", line_no));
            try {
                std::size_t used = 0;
                const std::string lo_s = trim(range.substr(0, dots)), hi_s = trim(range.substr(dots + 2));
                const double lo = std::stod(lo_s, &used);
                if (used != lo_s.size()) throw std::invalid_argument("lo");
                const double hi = std::stod(hi_s, &used);
                if (used != hi_s.size()) throw std::invalid_argument("hi");
                entry.range = std::make_pair(lo, hi);
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: bad range '{}'", line_no, range));
            }
        }
        std::size_t p = 0;
        while (p <= rhs.size()) {
            std::size_t comma = rhs.find(',', p);
            if (comma == std::string::npos) comma = rhs.size();
            std::string kw = trim(std::string_view(rhs).substr(p, comma - p));
            if (!kw.empty()) entry.keywords.push_back(lower(kw));
            p = comma + 1;
        }
        if (entry.keywords.empty())
            throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: no keywords for '{}'", line_no, unit_text));
        cfg.entries.push_back(std::move(entry));
    }
    return cfg;
}

void KeywordConfig::merge(const KeywordConfig& other) {
    for (const auto& e : other.entries) {
        auto it = std::find_if(entries.begin(), entries.end(), [&](const UnitKeywords& x) { return x.unit == e.unit; });
        if (it != entries.end())
            *it = e;
        else
            entries.push_back(e);
    }
}

std::vector<std::string> KeywordConfig::vocabulary() const {
    std::vector<std::string> out;
    for (auto k : {UnitKind::NoUnit, UnitKind::MHz, UnitKind::Hz, UnitKind::EARFCN, UnitKind::dBm, UnitKind::dB,
                   UnitKind::Hexadecimal, UnitKind::Decimal, UnitKind::Seconds, UnitKind::Milliseconds,
                   UnitKind::DecimalDegrees})
        out.push_back(unit_name(Unit{k}));
    for (const auto& e : entries)
        if (e.unit.kind == UnitKind::Custom && std::find(out.begin(), out.end(), e.unit.custom) == out.end())
            out.push_back(e.unit.custom);
    return out;
}

std::string_view to_string(QuestionKind q) {
    switch (q) {
        case QuestionKind::Unit: return "unit";
        case QuestionKind::BroadType: return "broad_type";
        case QuestionKind::Role: return "role";
        case QuestionKind::Aggregation: return "aggregation";
    }
    return "unit";
}

namespace detail {

std::pair<Unit, std::string> heuristic_unit(const ColumnEvidence& e, const KeywordConfig& keywords) {
    if (e.type == ColumnType::Timestamp) return {Unit{UnitKind::Seconds}, "timestamp column"};

    const bool numeric = is_numeric_type(e.type);
    for (const auto& entry : keywords.entries) {
        if (numeric_unit(entry.unit) && !numeric) continue;
        if (entry.unit.kind == UnitKind::Hexadecimal && numeric) continue;
        if (entry.range && e.min && e.max && (*e.min < entry.range->first || *e.max > entry.range->second)) continue;
        for (const auto& kw : entry.keywords)
            if (keyword_matches(e.name, kw)) return {entry.unit, fmt::format("keyword '{}'", kw)};
    }

    if (numeric && e.min && e.max) {
        const double lo = *e.min, hi = *e.max;
        if (lo >= -156 && hi <= -31 && name_has_any(e.name, {"power", "pwr", "signal", "level", "strength"}))
            return {Unit{UnitKind::dBm}, "value range of received power"};
        if (e.all_integer && lo >= 0 && hi <= 262143 && name_has_any(e.name, {"ch", "chan", "channel", "arfcn"}))
            return {Unit{UnitKind::EARFCN}, "value range of channel numbers"};
        if (lo >= -90 && hi <= 90 && name_has_any(e.name, {"lat", "latitude"}))
            return {Unit{UnitKind::DecimalDegrees}, "value range of latitudes"};
        if (lo >= -180 && hi <= 180 && name_has_any(e.name, {"lon", "lng", "longitude"}))
            return {Unit{UnitKind::DecimalDegrees}, "value range of longitudes"};
        if (lo >= 1e8 && name_has_any(e.name, {"time", "ts", "timestamp", "epoch"}))
            return hi < 1e11 ? std::pair{Unit{UnitKind::Seconds}, std::string("epoch seconds range")}
                             : std::pair{Unit{UnitKind::Milliseconds}, std::string("epoch milliseconds range")};
    }
    if (e.all_hex) return {Unit{UnitKind::Hexadecimal}, "0x-prefixed values"};
    return {Unit{UnitKind::NoUnit}, "no evidence"};
}

BroadType heuristic_broad_type(const ColumnEvidence& e) {
    if (e.type == ColumnType::Timestamp) return BroadType::TimestampType;
    const Unit u = e.unit.value_or(Unit{});
    switch (u.kind) {
        case UnitKind::Hexadecimal:
        case UnitKind::Decimal: return BroadType::Categorical;
        case UnitKind::NoUnit:
            if (!is_numeric_type(e.type)) return BroadType::Categorical;
            if (e.all_integer && e.min && *e.min >= 0 && *e.max <= 10 && e.distinct_count <= 10)
                return BroadType::Ordinal;
            return BroadType::Numerical;
        case UnitKind::Custom: return is_numeric_type(e.type) ? BroadType::Numerical : BroadType::Categorical;
        default: return is_numeric_type(e.type) ? BroadType::Numerical : BroadType::Categorical;
    }
}

ColumnRole heuristic_role(const ColumnEvidence& e, BroadType broad) {
    const Unit u = e.unit.value_or(Unit{});
    if (u.kind == UnitKind::dBm || u.kind == UnitKind::dB) return ColumnRole::Aggregating;
    if (broad == BroadType::Categorical || broad == BroadType::TimestampType) return ColumnRole::Grouping;
    // Channel identifiers and carrier frequencies key the measurements.
    if (u.kind == UnitKind::EARFCN || u.kind == UnitKind::Hexadecimal || u.kind == UnitKind::Decimal ||
        u.kind == UnitKind::MHz || u.kind == UnitKind::Hz)
        return ColumnRole::Grouping;
    if (e.all_integer && static_cast<double>(e.distinct_count) <= std::sqrt(static_cast<double>(e.row_count)))
        return ColumnRole::Grouping;
    return ColumnRole::Aggregating;
}

}  // namespace detail

std::string heuristic_answer(QuestionKind question, const ColumnEvidence& evidence, const KeywordConfig& keywords) {
    switch (question) {
        case QuestionKind::Unit: return unit_name(detail::heuristic_unit(evidence, keywords).first);
        case QuestionKind::BroadType: return std::string(to_string(detail::heuristic_broad_type(evidence)));
        case QuestionKind::Role: {
            const BroadType b = detail::heuristic_broad_type(evidence);
            return std::string(to_string(detail::heuristic_role(evidence, b)));
        }
        case QuestionKind::Aggregation: {
            const Unit u = evidence.unit.value_or(Unit{});
            if (u.kind == UnitKind::dBm || u.kind == UnitKind::dB) return "log_mean";
            if (detail::heuristic_broad_type(evidence) == BroadType::Ordinal) return "median";
            if (!is_numeric_type(evidence.type)) return "mode";
            return "mean";
        }
    }
    return "";
}

std::string render_prompt(QuestionKind question, const ColumnEvidence& e, const KeywordConfig& keywords) {
    const std::string unit = unit_name(e.unit.value_or(Unit{}));
    switch (question) {
        case QuestionKind::Unit: {
            const std::string vocab = python_list(keywords.vocabulary());
            return fmt::format(
                "You are an expert wireless data profiler.\n"
                "I have a column in a pandas dataframe named {}.\n"
                "It has a minimum value of {}, max value of {}, and {} unique values.\n"
                "Here are some sample values:\n{}\n"
                "Tell me the unit of this column's values- only choose from {}.\n"
                "For example, a test score has no unit, so answer \"no unit\".\n"
                "However, a temperature has a unit \"celsius\".\n"
                "Answer only either {}, and nothing else.\n",
                e.name, render_bound(e, true), render_bound(e, false), e.distinct_count, sample_line(e), vocab, vocab);
        }
        case QuestionKind::BroadType:
            return fmt::format(
                "You are an expert wireless data profiler.\n"
                "I have a data in a column named {} with the unit of {}.\n"
                "Here is a sample of that data:\n{}\n"
                "Tell me if data with this unit's values are timestamp, categorical, numerical, or ordinal.\n"
                "For example, temperature's unit is celsius, so it is a \"number\", even if some values are string "
                "values in it (to represent missing values).\n"
                "For example, even though a bank account ID has no unit, it is \"categorical\" because the records "
                "can be grouped by bank account ID.\n"
                "For example, even though a score ranging from 1 to 5 is a number, because it has no unit, it is "
                "\"ordinal\".\n"
                "Answer only either \"timestamp\", \"categorical\", \"numerical\", or \"ordinal\", and nothing else.\n",
                e.name, unit, sample_line(e));
        case QuestionKind::Role:
            return fmt::format(
                "You are an expert wireless data profiler.\n"
                "I have a column in a pandas dataframe named {}, with other columns in the dataframe being {}.\n"
                "It has a unit of {}.\n"
                "Here are some sample values:\n{}\n"
                "You should decide if this column goes in the `agg()` part (\"aggregating\"),\n"
                "or if this column goes in the `groupby` part (\"grouping\")\n"
                "of an aggregation query in pandas.\n"
                "For example, in a dataframe with columns <date,product_id,units_sold>, date and product_id are "
                "assigned \"grouping\", and units_sold \"aggregating\".\n"
                "Answer only either \"aggregating\" or \"grouping\" and nothing else.\n",
                e.name, python_list(e.siblings), unit, sample_line(e));
        case QuestionKind::Aggregation:
            return fmt::format(
                "You are an expert wireless data profiler.\n"
                "I have a column in a pandas dataframe named {}.\n"
                "It has a unit of {}.\n"
                "Here are some sample values:\n{}\n"
                "You should decide what aggregation method to use to combine multiple values into one data point.\n"
                "Your choices are: ['mean', 'sum', 'mode', 'median', 'log_mean'].\n"
                "Their descriptions are: ['arithmetic mean', 'sum', 'most frequent value', '50th percentile value', "
                "'convert to linear domain, do arithmetic mean, convert back to log domain'].\n"
                "Answer only one of ['mean', 'sum', 'mode', 'median', 'log_mean'] and nothing else.\n",
                e.name, unit, sample_line(e));
    }
    return "";
}

std::optional<Unit> parse_unit_answer(std::string_view answer, const KeywordConfig& keywords) {
    const std::string a = normalize_answer(answer);
    for (const auto& v : keywords.vocabulary())
        if (lower(v) == a) {
            if (auto u = unit_from_name(v)) return u;
            return Unit::custom_unit(v);
        }
    return std::nullopt;
}

std::optional<BroadType> parse_broad_type_answer(std::string_view answer) {
    const std::string a = normalize_answer(answer);
    if (a == "timestamp") return BroadType::TimestampType;
    if (a == "categorical") return BroadType::Categorical;
    if (a == "numerical" || a == "number" || a == "numeric") return BroadType::Numerical;
    if (a == "ordinal") return BroadType::Ordinal;
    return std::nullopt;
}

std::optional<ColumnRole> parse_role_answer(std::string_view answer) {
    const std::string a = normalize_answer(answer);
    if (a == "aggregating") return ColumnRole::Aggregating;
    if (a == "grouping") return ColumnRole::Grouping;
    return std::nullopt;
}

std::optional<AggFn> parse_aggregation_answer(std::string_view answer) {
    return agg_from_string(normalize_answer(answer));
}

}  // namespace rfw::profiler
