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

#include "rfw/suggest/suggest.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rfw/core/error.hpp"
#include "rfw/dsl/exec.hpp"
#include "rfw/profiler/evidence.hpp"

namespace rfw::suggest {

using constraints::Constraint;
using dsl::WranglingOp;

namespace {

const Table* table_named(const TableList& tables, std::string_view name) {
    for (const Table* t : tables)
        if (t && t->name() == name) return t;
    return nullptr;
}

const profiler::TableProfiles* profiles_of(const profiler::ProfileCatalog& catalog, std::string_view table) {
    auto it = catalog.find(table);
    return it == catalog.end() ? nullptr : &it->second;
}

std::vector<std::string> constraints_on(const std::vector<Constraint>& cs, const std::string& table) {
    std::vector<std::string> ids;
    for (const auto& c : cs) {
        const auto tables = constraints::constraint_tables(c);
        if (std::find(tables.begin(), tables.end(), table) != tables.end()) ids.push_back(constraints::constraint_id(c));
    }
    return ids;
}

std::size_t count_null(const Column& c) {
    return static_cast<std::size_t>(std::count_if(c.cells.begin(), c.cells.end(), [](const Cell& v) { return v.is_null(); }));
}

bool has_text(const Column& c) {
    return std::any_of(c.cells.begin(), c.cells.end(), [](const Cell& v) { return v.kind() == CellKind::Text; });
}

std::string join_names(const std::vector<std::string>& v) {
    return v.empty() ? "-" : fmt::format("{}", fmt::join(v, ","));
}

// Order in which downsample functions are tried; every one is generated so that
// pruning sees the semantically wrong ones too.
constexpr AggFn k_agg_grid[] = {AggFn::LogMean, AggFn::Mean, AggFn::Median, AggFn::Mode, AggFn::Sum};

struct Grid {
    std::vector<Candidate> out;
    std::vector<std::string> targets;

    void add(WranglingOp op, std::string provenance) {
        for (const auto& c : out)
            if (c.op == op) return;
        out.push_back(Candidate{std::move(op), targets, std::move(provenance)});
    }
};

void table_grid(Grid& g, const Table& t, const profiler::TableProfiles& p, Duration delta) {
    const auto* ti = p.time_index();
    std::vector<std::string> grouping, aggregating;
    for (const auto& col : p.columns) {
        if (ti && col.column == ti->column) continue;
        if (!t.find_column(col.column)) continue;
        (col.role == ColumnRole::Aggregating ? aggregating : grouping).push_back(col.column);
    }

    for (const auto& name : aggregating) {
        const auto* prof = p.find(name);
        std::vector<std::vector<std::string>> groupings;
        if (!grouping.empty()) groupings.push_back(grouping);
        groupings.emplace_back();
        for (const auto& fn : prof->allowed_imputations) {
            if (fn.kind == ImputeKind::Interpolate && !ti) continue;
            for (const auto& gb : groupings)
                g.add(dsl::Impute{t.name(), name, fn, gb},
                      fmt::format("impute {} x {} x group_by {}", name, to_string(fn), join_names(gb)));
        }
    }

    if (ti && !aggregating.empty()) {
        const std::string& tc = ti->column;
        for (AggFn f : k_agg_grid) {
            std::vector<std::pair<std::string, AggFn>> agg;
            for (const auto& name : aggregating) agg.emplace_back(name, f);
            g.add(dsl::Downsample{t.name(), tc, delta, grouping, std::move(agg)},
                  fmt::format("downsample {} x {}", format_duration(delta), to_string(f)));
        }
        // Mixed tables: each column with its own preferred function.
        std::vector<std::pair<std::string, AggFn>> own;
        for (const auto& name : aggregating) {
            const auto& allowed = p.find(name)->allowed_aggregations;
            own.emplace_back(name, allowed.empty() ? AggFn::Mode : allowed.front());
        }
        g.add(dsl::Downsample{t.name(), tc, delta, grouping, std::move(own)},
              fmt::format("downsample {} x per-column default", format_duration(delta)));

        std::vector<ImputeKind> fills;
        for (const auto& name : aggregating)
            for (const auto& fn : p.find(name)->allowed_imputations)
                if (fn.kind != ImputeKind::Constant && std::find(fills.begin(), fills.end(), fn.kind) == fills.end())
                    fills.push_back(fn.kind);
        for (ImputeKind k : fills) {
            std::vector<std::pair<std::string, ImputeFn>> fill;
            for (const auto& name : aggregating) {
                const auto* prof = p.find(name);
                const ImputeFn want{k, {}};
                fill.emplace_back(name, prof->allows(want) || prof->allowed_imputations.empty()
                                            ? want
                                            : prof->allowed_imputations.front());
            }
            g.add(dsl::Upsample{t.name(), tc, delta, grouping, std::move(fill)},
                  fmt::format("upsample {} x {}", format_duration(delta), to_string(ImputeFn{k, {}})));
        }
    }

    if (ti) g.add(dsl::Round{t.name(), ti->column, delta, std::nullopt}, fmt::format("round {} x {}", ti->column, format_duration(delta)));

    for (const auto& col : p.columns) {
        if (!t.find_column(col.column)) continue;
        const Column& c = t.column(col.column);
        const Unit from = c.declared_unit.value_or(col.unit);
        const auto targets = c.declared_unit ? profiler::synthesize_strategies(from, col.broad_type, col.role).cast_targets
                                             : col.cast_targets;
        for (const Unit& to : targets) {
            if (!dsl::cast_supported(from, to)) continue;
            g.add(dsl::Cast{t.name(), col.column, from, to, std::nullopt},
                  fmt::format("cast {} x {} -> {}", col.column, unit_name(from), unit_name(to)));
        }
    }

    for (const auto& c : t.columns()) {
        if (count_null(c) > 0)
            g.add(dsl::DropRow{t.name(), dsl::DropRow::Predicate::NullIn, c.name}, fmt::format("droprow null {}", c.name));
        const auto* prof = p.find(c.name);
        const bool numeric = prof && (prof->broad_type == BroadType::Numerical || prof->broad_type == BroadType::Ordinal);
        if (numeric && c.type != ColumnType::Text && has_text(c))
            g.add(dsl::DropRow{t.name(), dsl::DropRow::Predicate::NotNumericIn, c.name},
                  fmt::format("droprow not_numeric {}", c.name));
    }
}

// Columns and functions an op asks the profile about.
bool profile_allows(const WranglingOp& op, const profiler::TableProfiles& p) {
    auto ok_agg = [&](const std::string& col, AggFn f) {
        const auto* prof = p.find(col);
        return !prof || prof->allows(f);
    };
    auto ok_fill = [&](const std::string& col, const ImputeFn& f) {
        const auto* prof = p.find(col);
        return !prof || prof->allows(f);
    };
    if (const auto* i = std::get_if<dsl::Impute>(&op)) return ok_fill(i->column, i->method);
    if (const auto* d = std::get_if<dsl::Downsample>(&op))
        return std::all_of(d->agg.begin(), d->agg.end(), [&](const auto& a) { return ok_agg(a.first, a.second); });
    if (const auto* u = std::get_if<dsl::Upsample>(&op))
        return std::all_of(u->fill.begin(), u->fill.end(), [&](const auto& a) { return ok_fill(a.first, a.second); });
    return true;
}

}  // namespace

nlohmann::json to_json(const BudgetPolicy& p) {
    return {{"p", p.p.to_double()}, {"p_exact", p.p.to_string()}, {"k", p.k}};
}

BudgetPolicy policy_from_json(const nlohmann::json& j, BudgetPolicy base) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "policy must be a JSON object");
    if (j.contains("p")) {
        const auto& p = j.at("p");
        if (p.is_number()) base.p = Rational::from_double(p.get<double>());
        else if (p.is_string()) base.p = Rational::parse(p.get<std::string>());
        else throw Error(ErrorCode::InvalidArgument, "policy p must be a number or a string");
    }
    if (j.contains("k")) {
        const auto& k = j.at("k");
        if (!k.is_number_integer() || k.get<std::int64_t>() <= 0)
            throw Error(ErrorCode::InvalidArgument, "policy k must be a positive integer");
        base.k = k.get<std::size_t>();
    }
    if (base.p > Rational(1, 1)) throw Error(ErrorCode::InvalidArgument, "policy p must lie in [0, 1]");
    return base;
}

std::vector<std::string> Suggestion::satisfied() const {
    std::vector<std::string> ids;
    for (const auto& g : gains)
        if (g.reduction() > 0) ids.push_back(g.constraint_id);
    return ids;
}

nlohmann::json to_json(const Suggestion& s) {
    nlohmann::json gains = nlohmann::json::array();
    for (const auto& g : s.gains)
        gains.push_back({{"constraint", g.constraint_id}, {"before", g.before}, {"after", g.after}});
    return {{"id", s.id},
            {"op", dsl::to_json(s.op)},
            {"score", s.score},
            {"side_effect", dsl::to_json(s.side_effect)},
            {"rank", s.rank},
            {"constraints", s.target_constraints},
            {"satisfies", s.satisfied()},
            {"gains", gains},
            {"sample_spec",
             {{"window_count", s.sample_spec.window_count},
              {"window_length", s.sample_spec.window_length},
              {"seed", s.sample_spec.seed}}},
            {"explanation", s.explanation}};
}

std::vector<Candidate> generate_candidates(const TableList& tables, const profiler::ProfileCatalog& profiles,
                                           const std::vector<Constraint>& constraints, Duration delta) {
    std::vector<Candidate> out;
    for (const Table* t : tables) {
        if (!t) continue;
        const auto* p = profiles_of(profiles, t->name());
        if (!p) continue;
        Grid g;
        g.targets = constraints_on(constraints, t->name());
        table_grid(g, *t, *p, delta);
        for (auto& c : g.out) out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> prune_semantic(const std::vector<Candidate>& candidates, const TableList& tables,
                                      const profiler::ProfileCatalog& profiles, profiler::ProfilerBackend* verifier,
                                      std::vector<std::string>* log) {
    auto note = [&](std::string line) {
        if (log) log->push_back(std::move(line));
    };
    // verifier answers per table.column; nullopt means no usable opinion
    std::map<std::string, std::optional<AggFn>> verdicts;
    bool verifier_ok = verifier != nullptr;

    auto verdict = [&](const std::string& table, const std::string& column) -> std::optional<AggFn> {
        const std::string key = table + "." + column;
        if (auto it = verdicts.find(key); it != verdicts.end()) return it->second;
        std::optional<AggFn> v;
        const Table* t = table_named(tables, table);
        if (verifier_ok && t && t->find_column(column)) {
            auto e = profiler::gather_evidence(*t, column);
            if (const auto* p = profiles_of(profiles, table))
                if (const auto* prof = p->find(column)) e.unit = prof->unit;
            const auto keywords = profiler::KeywordConfig::defaults();
            try {
                const std::string answer = verifier->answer(
                    profiler::QuestionKind::Aggregation,
                    profiler::render_prompt(profiler::QuestionKind::Aggregation, e, keywords), e);
                v = profiler::parse_aggregation_answer(answer);
                if (v) note(fmt::format("verifier chose {} for {}", to_string(*v), key));
                else note(fmt::format("verifier gave out-of-vocabulary answer for {}, profile used", key));
            } catch (const Error& err) {
                verifier_ok = false;
                note(fmt::format("verifier unavailable ({}), profile-only pruning", err.what()));
            }
        }
        verdicts.emplace(key, v);
        return v;
    };

    std::vector<Candidate> kept;
    for (const auto& c : candidates) {
        const std::string& table = dsl::op_table(c.op);
        if (const auto* p = profiles_of(profiles, table); p && !profile_allows(c.op, *p)) continue;
        if (const auto* d = std::get_if<dsl::Downsample>(&c.op); d && verifier_ok) {
            bool agree = true;
            for (const auto& [col, fn] : d->agg) {
                const auto v = verdict(table, col);
                if (v && *v != fn) agree = false;
            }
            if (!agree) continue;
        }
        kept.push_back(c);
    }
    return kept;
}

std::vector<Table> sample_slices(const Table& t, const profiler::TableProfiles* profiles, Duration delta,
                                 const SampleSpec& spec) {
    const auto* ti = profiles ? profiles->time_index() : nullptr;
    if (!ti || !t.find_column(ti->column)) return {t};
    return sample_window_slices(t, ti->column, delta, spec);
}

ScoredCandidate score_candidate(const Candidate& c, const std::vector<Table>& slices,
                                const std::vector<Constraint>& constraints, const constraints::UnitResolver& units,
                                const profiler::TableProfiles* profiles, const dsl::BandTable& bands) {
    ScoredCandidate out;
    out.candidate = c;
    const std::string& table = dsl::op_table(c.op);
    std::vector<const Constraint*> relevant;
    for (const auto& k : constraints)
        if (std::find(c.target_constraints.begin(), c.target_constraints.end(), constraints::constraint_id(k)) !=
            c.target_constraints.end())
            relevant.push_back(&k);
    try {
        for (const auto* k : relevant) out.gains.push_back({constraints::constraint_id(*k), 0, 0});
        for (const Table& slice : slices) {
            if (slice.name() != table) throw Error(ErrorCode::InvalidOp, "sample belongs to another table");
            auto r = dsl::apply(c.op, slice, profiles, bands);
            for (std::size_t i = 0; i < relevant.size(); ++i) {
                out.gains[i].before += static_cast<std::int64_t>(constraints::evaluate(slice, *relevant[i], units).total_degree);
                out.gains[i].after += static_cast<std::int64_t>(constraints::evaluate(r.table, *relevant[i], units).total_degree);
            }
            out.side_effect += r.effect;
        }
        out.score = 0;
        for (const auto& g : out.gains) out.score += g.reduction();
    } catch (const Error& e) {
        out.score = 0;
        out.gains.clear();
        out.side_effect = {};
        out.discarded = fmt::format("{}: {}", to_string(e.code()), e.what());
    }
    return out;
}

std::vector<ScoredCandidate> score_all(const std::vector<Candidate>& candidates, const TableList& tables,
                                       const profiler::ProfileCatalog& profiles,
                                       const std::vector<Constraint>& constraints, Duration delta,
                                       const SampleSpec& spec, const dsl::BandTable& bands) {
    std::map<std::string, std::vector<Table>, std::less<>> samples;
    for (const auto& c : candidates) {
        const std::string& name = dsl::op_table(c.op);
        if (samples.count(name)) continue;
        const Table* t = table_named(tables, name);
        if (!t) throw Error(ErrorCode::UnknownTable, fmt::format("no table named '{}'", name));
        samples.emplace(name, sample_slices(*t, profiles_of(profiles, name), delta, spec));
    }
    const auto units = constraints::profile_unit_resolver(profiles);

    std::vector<ScoredCandidate> out(candidates.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < candidates.size(); i = next++) {
            const std::string& name = dsl::op_table(candidates[i].op);
            out[i] = score_candidate(candidates[i], samples.find(name)->second, constraints, units,
                                     profiles_of(profiles, name), bands);
            out[i].order = i;
        }
    };
    const std::size_t n = std::min<std::size_t>(candidates.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

Ranking rank_suggestions(const std::vector<ScoredCandidate>& scored, const BudgetPolicy& policy,
                         const SampleSpec& spec) {
    std::vector<const ScoredCandidate*> live;
    for (const auto& s : scored)
        if (!s.discarded && s.score > 0 && s.side_effect.row_fraction() <= policy.p) live.push_back(&s);

    std::sort(live.begin(), live.end(), [](const ScoredCandidate* a, const ScoredCandidate* b) {
        if (a->score != b->score) return a->score > b->score;
        const auto fa = a->side_effect.row_fraction(), fb = b->side_effect.row_fraction();
        if (fa != fb) return fa < fb;
        if (a->candidate.op.index() != b->candidate.op.index()) return a->candidate.op.index() < b->candidate.op.index();
        return a->order < b->order;
    });

    Ranking out;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto* s : live) {
        if (out.suggestions.size() >= policy.k) break;
        const auto& op = s->candidate.op;
        if (!seen.emplace(dsl::op_table(op), std::string(dsl::op_kind(op)), dsl::op_target(op)).second) continue;
        Suggestion sg;
        sg.rank = out.suggestions.size() + 1;
        sg.id = fmt::format("W{}", sg.rank);
        sg.op = op;
        sg.score = s->score;
        sg.side_effect = s->side_effect;
        sg.sample_spec = spec;
        sg.target_constraints = s->candidate.target_constraints;
        sg.gains = s->gains;
        out.max_row_fraction = std::max(out.max_row_fraction, sg.side_effect.row_fraction());
        out.suggestions.push_back(std::move(sg));
    }
    return out;
}

}  // namespace rfw::suggest
