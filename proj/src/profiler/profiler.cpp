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

#include "rfw/profiler/profiler.hpp"

#include <algorithm>
#include <cctype>
#include <future>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw::profiler {
namespace {

template <typename T, typename Parse>
T ask(QuestionKind q, const ColumnEvidence& ev, const ProfilerConfig& config, ProfilerBackend& backend, Parse parse,
      SemanticProfile& profile, bool& from_backend) {
    const std::string prompt = render_prompt(q, ev, config.keywords);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw;
        try {
            raw = backend.answer(q, prompt, ev);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BackendUnavailable) throw;
            profile.provenance.push_back(fmt::format("{}: {} unavailable ({}), heuristic used", to_string(q),
                                                     backend.name(), e.what()));
            break;
        }
        if (auto v = parse(raw)) {
            from_backend = true;
            profile.provenance.push_back(fmt::format("{}: {} answered '{}'", to_string(q), backend.name(), raw));
            return *v;
        }
        profile.provenance.push_back(
            fmt::format("{}: {} gave out-of-vocabulary answer '{}'", to_string(q), backend.name(), raw));
    }
    from_backend = false;
    return *parse(heuristic_answer(q, ev, config.keywords));
}

bool time_like(std::string_view name) {
    std::string l(name);
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    return l.find("time") != std::string::npos || l == "ts" || l.find("date") != std::string::npos;
}

}  // namespace

SemanticProfile profile_column(const Table& t, std::string_view column, const ProfilerConfig& config) {
    ColumnEvidence ev = gather_evidence(t, column);
    SemanticProfile p;
    p.column = ev.name;

    std::shared_ptr<ProfilerBackend> backend = config.backend;
    if (config.kind == BackendKind::Heuristic || !backend) backend = std::make_shared<HeuristicBackend>(config.keywords);
    const bool heuristic = backend->name() == "heuristic";

    if (ev.unit) {
        p.unit = *ev.unit;
        p.confidence = 1.0;
        p.provenance.push_back(fmt::format("unit: declared {}", unit_name(p.unit)));
    } else if (heuristic) {
        auto [u, reason] = detail::heuristic_unit(ev, config.keywords);
        p.unit = u;
        p.confidence = reason.starts_with("keyword") || reason == "timestamp column" ? 1.0
                       : reason == "no evidence"                                   ? 0.5
                                                                                   : 0.8;
        p.provenance.push_back(fmt::format("unit: heuristic {} ({})", unit_name(u), reason));
        if (reason.starts_with("keyword")) p.provenance.push_back("unit: name keywords take precedence over value ranges");
    } else {
        bool ok = false;
        p.unit = ask<Unit>(QuestionKind::Unit, ev, config, *backend,
                           [&](std::string_view a) { return parse_unit_answer(a, config.keywords); }, p, ok);
        p.confidence = ok ? 0.9 : 0.5;
    }
    ev.unit = p.unit;

    bool ok = false;
    if (heuristic) {
        p.broad_type = detail::heuristic_broad_type(ev);
    } else {
        p.broad_type = ask<BroadType>(QuestionKind::BroadType, ev, config, *backend, parse_broad_type_answer, p, ok);
    }
    if (p.broad_type == BroadType::TimestampType && ev.type != ColumnType::Timestamp) {
        p.broad_type = detail::heuristic_broad_type(ev);
        p.provenance.push_back("broad_type: only timestamp-typed columns can be timestamps");
    }

    if (p.broad_type == BroadType::TimestampType) {
        p.role = ColumnRole::TimeIndex;
    } else if (heuristic) {
        p.role = detail::heuristic_role(ev, p.broad_type);
    } else {
        p.role = ask<ColumnRole>(QuestionKind::Role, ev, config, *backend, parse_role_answer, p, ok);
    }
    if ((p.unit.kind == UnitKind::dBm || p.unit.kind == UnitKind::dB) && p.role == ColumnRole::Grouping) {
        p.role = ColumnRole::Aggregating;
        p.provenance.push_back("role: logarithmic power columns are always aggregating");
    }

    Strategies s = synthesize_strategies(p.unit, p.broad_type, p.role);
    p.allowed_aggregations = std::move(s.allowed_aggregations);
    p.allowed_imputations = std::move(s.allowed_imputations);
    p.cast_targets = std::move(s.cast_targets);
    p.scale = s.scale;
    return p;
}

TableProfiles profile_table(const Table& t, const ProfilerConfig& config) {
    TableProfiles out;
    out.table = t.name();
    std::vector<std::future<SemanticProfile>> futures;
    for (const auto& c : t.columns())
        futures.push_back(std::async(std::launch::async, [&t, &config, name = c.name] {
            return profile_column(t, name, config);
        }));
    for (auto& f : futures) out.columns.push_back(f.get());

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < out.columns.size(); ++i)
        if (out.columns[i].role == ColumnRole::TimeIndex) candidates.push_back(i);
    if (candidates.size() > 1) {
        std::size_t keep = candidates.front();
        for (auto i : candidates)
            if (time_like(out.columns[i].column)) {
                keep = i;
                break;
            }
        for (auto i : candidates) {
            if (i == keep) continue;
            auto& p = out.columns[i];
            p.broad_type = BroadType::Categorical;
            p.role = ColumnRole::Aggregating;
            Strategies s = synthesize_strategies(p.unit, p.broad_type, p.role);
            p.allowed_aggregations = {AggFn::Mode};
            p.allowed_imputations = std::move(s.allowed_imputations);
            p.cast_targets.clear();
            p.provenance.push_back(
                fmt::format("role: demoted, '{}' is the time index of this table", out.columns[keep].column));
        }
    }
    return out;
}

}  // namespace rfw::profiler
