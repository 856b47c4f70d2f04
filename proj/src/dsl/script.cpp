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

#include "rfw/dsl/script.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw::dsl {
namespace {

std::string quote(const std::string& v) {
    const bool plain = !v.empty() && std::none_of(v.begin(), v.end(), [](unsigned char c) {
        return std::isspace(c) || c == '"' || c == '#' || c == '\\';
    });
    if (plain) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

std::string number_text(double v) { return fmt::format("{}", v); }

[[noreturn]] void syntax(const std::string& msg) { throw Error(ErrorCode::ScriptSyntax, msg); }

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') break;
        std::string tok;
        bool quoted = false;
        while (i < line.size() && (quoted || !std::isspace(static_cast<unsigned char>(line[i])))) {
            const char c = line[i];
            if (c == '"') {
                quoted = !quoted;
            } else if (c == '\\' && quoted && i + 1 < line.size()) {
                tok += line[++i];
            } else if (c == '#' && !quoted) {
                i = line.size();
                break;
            } else {
                tok += c;
            }
            ++i;
        }
        if (quoted) syntax("unterminated quote");
        out.push_back(std::move(tok));
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::size_t p = 0;
    while (true) {
        const auto q = s.find(sep, p);
        out.push_back(s.substr(p, q == std::string::npos ? std::string::npos : q - p));
        if (q == std::string::npos) break;
        p = q + 1;
    }
    return out;
}

class Args {
public:
    Args(std::string verb, std::map<std::string, std::string> kv) : verb_(std::move(verb)), kv_(std::move(kv)) {}

    std::string take(const std::string& key) {
        auto v = take_opt(key);
        if (!v) syntax(fmt::format("{}: missing '{}='", verb_, key));
        return *v;
    }
    std::optional<std::string> take_opt(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        std::string v = std::move(it->second);
        kv_.erase(it);
        return v;
    }
    void done() const {
        if (!kv_.empty()) syntax(fmt::format("{}: unknown argument '{}'", verb_, kv_.begin()->first));
    }

private:
    std::string verb_;
    std::map<std::string, std::string> kv_;
};

Duration duration_arg(const std::string& s) {
    try {
        return parse_duration(s);
    } catch (const Error& e) {
        syntax(e.what());
    }
}

double double_arg(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) syntax(fmt::format("'{}' is not a number", s));
    return v;
}

int int_arg(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) syntax(fmt::format("'{}' is not an integer", s));
    return v;
}

Unit unit_arg(const std::string& s) {
    auto u = unit_from_token(s);
    if (!u) syntax(fmt::format("unknown unit '{}'", s));
    return *u;
}

ImputeFn impute_arg(const std::string& s) {
    auto f = impute_from_string(s);
    if (!f) syntax(fmt::format("unknown imputation '{}'", s));
    return *f;
}

AggFn agg_arg(const std::string& s) {
    auto f = agg_from_string(s);
    if (!f) syntax(fmt::format("unknown aggregation '{}'", s));
    return *f;
}

template <typename F>
auto pair_list(const std::string& s, F parse) {
    std::vector<std::pair<std::string, decltype(parse(std::string{}))>> out;
    for (const auto& item : split(s, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos || colon == 0) syntax(fmt::format("expected column:function, got '{}'", item));
        out.emplace_back(item.substr(0, colon), parse(item.substr(colon + 1)));
    }
    return out;
}

}  // namespace

std::string render_op(const WranglingOp& op) {
    struct Visitor {
        std::string operator()(const Cast& o) const {
            std::string s = fmt::format("cast table={} col={} from={} to={}", quote(o.table), quote(o.column),
                                        quote(unit_token(o.from)), quote(unit_token(o.to)));
            if (o.band_hint) s += fmt::format(" band={}", *o.band_hint);
            return s;
        }
        std::string operator()(const Round& o) const {
            std::string s = fmt::format("round table={} col={}", quote(o.table), quote(o.column));
            if (o.granularity) s += " granularity=" + format_duration(*o.granularity);
            if (o.decimals) s += fmt::format(" decimals={}", *o.decimals);
            return s;
        }
        std::string operator()(const Impute& o) const {
            std::string s = fmt::format("impute table={} col={} method={}", quote(o.table), quote(o.column),
                                        quote(to_string(o.method)));
            if (!o.group_by.empty()) s += " group_by=" + quote(join(o.group_by));
            return s;
        }
        std::string operator()(const Downsample& o) const {
            std::string s = fmt::format("downsample table={} time={} delta={}", quote(o.table), quote(o.time_column),
                                        format_duration(o.delta));
            if (!o.group_by.empty()) s += " group_by=" + quote(join(o.group_by));
            std::vector<std::string> items;
            for (const auto& [c, f] : o.agg) items.push_back(c + ":" + std::string(to_string(f)));
            if (!items.empty()) s += " agg=" + quote(join(items));
            return s;
        }
        std::string operator()(const Upsample& o) const {
            std::string s = fmt::format("upsample table={} time={} delta={}", quote(o.table), quote(o.time_column),
                                        format_duration(o.delta));
            if (!o.group_by.empty()) s += " group_by=" + quote(join(o.group_by));
            std::vector<std::string> items;
            for (const auto& [c, f] : o.fill) items.push_back(c + ":" + to_string(f));
            if (!items.empty()) s += " fill=" + quote(join(items));
            return s;
        }
        std::string operator()(const DropRow& o) const {
            std::string where;
            switch (o.predicate) {
                case DropRow::Predicate::NullIn: where = "null:" + o.column; break;
                case DropRow::Predicate::NotNumericIn: where = "not_numeric:" + o.column; break;
                case DropRow::Predicate::OutsideRange:
                    where = fmt::format("outside:{}:{}:{}", o.column, number_text(o.lo), number_text(o.hi));
                    break;
            }
            return fmt::format("droprow table={} where={}", quote(o.table), quote(where));
        }
    };
    return std::visit(Visitor{}, op);
}

std::string render_script(const std::vector<WranglingOp>& ops) {
    std::string out;
    for (const auto& op : ops) out += render_op(op) + "\n";
    return out;
}

WranglingOp parse_op(std::string_view line) {
    const auto tokens = tokenize(line);
    if (tokens.empty()) syntax("empty operation");
    const std::string& verb = tokens[0];
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos || eq == 0) syntax(fmt::format("expected key=value, got '{}'", tokens[i]));
        if (!kv.emplace(tokens[i].substr(0, eq), tokens[i].substr(eq + 1)).second)
            syntax(fmt::format("duplicate argument '{}'", tokens[i].substr(0, eq)));
    }
    Args a(verb, std::move(kv));

    WranglingOp op;
    if (verb == "cast") {
        Cast o;
        o.table = a.take("table");
        o.column = a.take("col");
        o.from = unit_arg(a.take("from"));
        o.to = unit_arg(a.take("to"));
        if (auto b = a.take_opt("band")) o.band_hint = int_arg(*b);
        op = o;
    } else if (verb == "round") {
        Round o;
        o.table = a.take("table");
        o.column = a.take("col");
        if (auto g = a.take_opt("granularity")) o.granularity = duration_arg(*g);
        if (auto d = a.take_opt("decimals")) o.decimals = int_arg(*d);
        if (o.granularity.has_value() == o.decimals.has_value())
            syntax("round: give exactly one of granularity= or decimals=");
        op = o;
    } else if (verb == "impute") {
        Impute o;
        o.table = a.take("table");
        o.column = a.take("col");
        o.method = impute_arg(a.take("method"));
        if (auto g = a.take_opt("group_by")) o.group_by = split(*g, ',');
        op = o;
    } else if (verb == "downsample") {
        Downsample o;
        o.table = a.take("table");
        o.time_column = a.take("time");
        o.delta = duration_arg(a.take("delta"));
        if (auto g = a.take_opt("group_by")) o.group_by = split(*g, ',');
        if (auto g = a.take_opt("agg")) o.agg = pair_list(*g, agg_arg);
        op = o;
    } else if (verb == "upsample") {
        Upsample o;
        o.table = a.take("table");
        o.time_column = a.take("time");
        o.delta = duration_arg(a.take("delta"));
        if (auto g = a.take_opt("group_by")) o.group_by = split(*g, ',');
        if (auto g = a.take_opt("fill")) o.fill = pair_list(*g, impute_arg);
        op = o;
    } else if (verb == "droprow") {
        DropRow o;
        o.table = a.take("table");
        const std::string where = a.take("where");
        if (where.starts_with("null:")) {
            o.predicate = DropRow::Predicate::NullIn;
            o.column = where.substr(5);
        } else if (where.starts_with("not_numeric:")) {
            o.predicate = DropRow::Predicate::NotNumericIn;
            o.column = where.substr(12);
        } else if (where.starts_with("outside:")) {
            o.predicate = DropRow::Predicate::OutsideRange;
            const std::string rest = where.substr(8);
            const auto c2 = rest.rfind(':');
            const auto c1 = c2 == std::string::npos || c2 == 0 ? std::string::npos : rest.rfind(':', c2 - 1);
            if (c1 == std::string::npos) syntax("droprow: expected where=outside:<col>:<lo>:<hi>");
            o.column = rest.substr(0, c1);
            o.lo = double_arg(rest.substr(c1 + 1, c2 - c1 - 1));
            o.hi = double_arg(rest.substr(c2 + 1));
        } else {
            syntax(fmt::format("droprow: unknown predicate '{}'", where));
        }
        if (o.column.empty()) syntax("droprow: missing column");
        op = o;
    } else {
        syntax(fmt::format("unknown operation '{}'", verb));
    }
    a.done();
    return op;
}

std::vector<WranglingOp> parse_script(std::string_view text) {
    std::vector<WranglingOp> ops;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        try {
            if (tokenize(line).empty()) continue;
            ops.push_back(parse_op(line));
        } catch (const Error& e) {
            throw Error(ErrorCode::ScriptSyntax, fmt::format("line {}: {}", line_no, e.what()), line_no);
        }
    }
    return ops;
}

}  // namespace rfw::dsl
