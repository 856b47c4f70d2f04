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

#include "rfw/session/session.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "rfw/core/error.hpp"
#include "rfw/core/sampling.hpp"
#include "rfw/dsl/script.hpp"
#include "rfw/session/json_io.hpp"

namespace rfw::session {

using nlohmann::json;

namespace {

std::string now_iso() {
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
    return format_iso8601_ms(Timestamp{static_cast<std::int64_t>(ns)});
}

std::size_t count_nulls(const Table& t) {
    std::size_t n = 0;
    for (const auto& c : t.columns())
        for (const auto& v : c.cells) n += v.is_null();
    return n;
}

json on_json(const std::vector<std::pair<std::string, std::string>>& on) {
    json a = json::array();
    for (const auto& [l, r] : on) a.push_back(json::array({l, r}));
    return a;
}

}  // namespace

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::Uploaded: return "uploaded";
        case Phase::Profiled: return "profiled";
        case Phase::ConstraintsConfirmed: return "constraints_confirmed";
        case Phase::Suggested: return "suggested";
        case Phase::Joined: return "joined";
    }
    return "uploaded";
}

json to_json(const PreviewDiff& d) {
    json markers = json::array();
    for (auto m : d.markers) markers.push_back(dsl::to_string(m));
    return {{"suggestion_id", d.suggestion_id},
            {"rows", table_to_json(d.rows)},
            {"markers", markers},
            {"deleted", d.deleted},
            {"residual_nulls", d.residual_nulls},
            {"effect", dsl::to_json(d.effect)}};
}

json to_json(const JoinSummary& j) {
    const auto& r = j.result;
    json warnings = json::array();
    if (r.keys_not_aligned) warnings.push_back("KeysNotAligned");
    return {{"table", r.table.name()},
            {"on", on_json(j.on)},
            {"rows", r.table.row_count()},
            {"left_matched", r.left_matched},
            {"right_matched", r.right_matched},
            {"unmatched_left", r.unmatched_left},
            {"unmatched_right", r.unmatched_right},
            {"match_fraction", r.match_fraction},
            {"warnings", warnings},
            {"preview", table_to_json(r.table, 5)}};
}

Session::Session(std::string id, std::shared_ptr<const SessionConfig> config)
    : id_(std::move(id)), config_(config ? std::move(config) : std::make_shared<const SessionConfig>()) {}

void Session::record(json event) { events_.push_back(std::move(event)); }

void Session::require_pipeline() const {
    if (phase_ < Phase::Suggested)
        throw Error(ErrorCode::InvalidPhase, "run the pipeline first");
}

std::size_t Session::table_index(std::string_view name) const {
    for (std::size_t i = 0; i < tables_.size(); ++i)
        if (tables_[i].name() == name) return i;
    throw Error(ErrorCode::UnknownTable, fmt::format("no table named '{}'", name));
}

const Table& Session::table(std::string_view name) const {
    for (const auto& t : tables_)
        if (t.name() == name) return t;
    for (const auto& t : joined_)
        if (t.name() == name) return t;
    throw Error(ErrorCode::UnknownTable, fmt::format("no table named '{}'", name));
}

suggest::TableList Session::table_list() const {
    suggest::TableList out;
    for (const auto& t : tables_) out.push_back(&t);
    return out;
}

const suggest::Suggestion& Session::find_suggestion(const std::string& id,
                                                    std::optional<std::uint64_t> generation) const {
    require_pipeline();
    if (generation && *generation != generation_)
        throw Error(ErrorCode::StaleSuggestion,
                    fmt::format("generation {} is stale, current is {}", *generation, generation_));
    for (const auto& s : suggestions_)
        if (s.id == id) return s;
    throw Error(ErrorCode::UnknownSuggestion, fmt::format("no suggestion '{}'", id));
}

json Session::upload_table(const std::string& name, std::string csv) {
    if (phase_ != Phase::Uploaded)
        throw Error(ErrorCode::InvalidPhase, "tables can only be uploaded before the pipeline runs");
    if (name.empty() || name.find_first_of(" \t\r\n=\"") != std::string::npos)
        throw Error(ErrorCode::InvalidArgument, fmt::format("invalid table name '{}'", name));
    for (const auto& t : tables_)
        if (t.name() == name) throw Error(ErrorCode::NameTaken, fmt::format("table '{}' already exists", name));

    Table t = ingest_csv(csv, name, config_->csv);
    json out = table_to_json(t, 5);
    tables_.push_back(std::move(t));
    uploads_.push_back({name, std::move(csv)});
    record({{"type", "upload"}, {"name", name}});
    return out;
}

void Session::profile_stage() {
    profiles_.clear();
    for (auto& t : tables_) {
        auto p = profiler::profile_table(t, config_->profiler);
        if (const auto* ti = p.time_index(); ti && !is_sorted_by_time(t, ti->column)) {
            t = sort_by_time(t, ti->column);
            log_.push_back(fmt::format("sorted '{}' by '{}'", t.name(), ti->column));
        }
        profiles_.emplace(t.name(), std::move(p));
    }
    phase_ = std::max(phase_, Phase::Profiled);
}

void Session::constraint_stage() {
    const auto list = table_list();
    joins_ = constraints::propose_joins(list, profiles_);

    std::vector<constraints::DeltaProbe> probes;
    for (const auto& t : tables_) {
        const auto& p = profiles_.at(t.name());
        const auto* ti = p.time_index();
        if (!ti) continue;
        auto determined = p.columns_with_role(ColumnRole::Aggregating);
        if (determined.empty()) continue;
        probes.push_back({&t, ti->column, p.columns_with_role(ColumnRole::Grouping), std::move(determined)});
    }
    detection_.reset();
    if (!probes.empty()) {
        try {
            detection_ = constraints::detect_delta(probes, config_->delta_candidates);
        } catch (const Error& e) {
            log_.push_back(fmt::format("delta detection skipped: {}", e.what()));
        }
    }
    delta_ = confirmed_delta_ ? *confirmed_delta_ : detection_ ? detection_->chosen : Duration{};

    constraints_.clear();
    std::size_t n = 1;
    std::set<std::pair<std::string, std::string>> paired;
    for (const auto& t : tables_) {
        try {
            constraints_.push_back(
                constraints::synthesize_tfd(t, profiles_.at(t.name()), delta_, fmt::format("R{}", n)));
            ++n;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoTimeIndex && e.code() != ErrorCode::NoDeterminedColumns) throw;
            log_.push_back(fmt::format("no temporal dependency for '{}': {}", t.name(), e.what()));
        }
        for (const auto& j : joins_) {
            if (j.left_table != t.name() || !paired.insert({j.left_table, j.right_table}).second) continue;
            const Table& right = tables_[table_index(j.right_table)];
            if (auto c = constraints::alignment_for(j, t, right, delta_, fmt::format("R{}", n))) {
                constraints_.push_back(std::move(*c));
                ++n;
            }
        }
    }
    for (const auto& u : user_tfds_) constraints_.push_back(u);
    phase_ = std::max(phase_, Phase::ConstraintsConfirmed);
}

void Session::report_stage() {
    reports_.clear();
    const auto units = constraints::profile_unit_resolver(profiles_);
    for (const auto& c : constraints_)
        for (const auto& name : constraints::constraint_tables(c))
            reports_.push_back(constraints::evaluate(tables_[table_index(name)], c, units));
}

void Session::rank_stage() {
    std::vector<suggest::ScoredCandidate> kept;
    for (const auto& s : scored_)
        if (!skipped_.contains(dsl::render_op(s.candidate.op))) kept.push_back(s);
    auto ranking = suggest::rank_suggestions(kept, policy_, config_->sample);
    for (auto& s : ranking.suggestions) s.explanation = explain::explain_brief(s, reports_);
    suggestions_ = std::move(ranking.suggestions);
    max_row_fraction_ = ranking.max_row_fraction;
    ++generation_;
}

void Session::suggest_stage() {
    const auto list = table_list();
    const auto candidates = suggest::generate_candidates(list, profiles_, constraints_, delta_);
    candidate_count_ = candidates.size();
    const auto pruned = suggest::prune_semantic(candidates, list, profiles_, config_->verifier.get(), &log_);
    pruned_count_ = pruned.size();
    scored_ = suggest::score_all(pruned, list, profiles_, constraints_, delta_, config_->sample, config_->bands);
    report_stage();
    rank_stage();
    phase_ = Phase::Suggested;
}

json Session::run_pipeline() {
    if (tables_.empty()) throw Error(ErrorCode::EmptyInput, "upload at least one table first");
    profile_stage();
    constraint_stage();
    suggest_stage();
    record({{"type", "pipeline"}});
    return pipeline_json();
}

json Session::set_policy(const suggest::BudgetPolicy& policy) {
    require_pipeline();
    policy_ = policy;
    record({{"type", "policy"}, {"policy", suggest::to_json(policy)}});
    rank_stage();
    return suggestions_json();
}

json Session::confirm_delta(Duration delta, bool force) {
    require_pipeline();
    if (delta.ns() <= 0) throw Error(ErrorCode::NonPositiveDelta, "delta must be positive");
    const auto& cs = config_->delta_candidates;
    if (!force && std::find(cs.begin(), cs.end(), delta) == cs.end())
        throw Error(ErrorCode::InvalidDelta,
                    fmt::format("{} is not a candidate granularity; pass force to use it anyway", format_duration(delta)));
    confirmed_delta_ = delta;
    record({{"type", "delta"}, {"delta", format_duration(delta)}, {"force", force}});
    constraint_stage();
    suggest_stage();
    return pipeline_json();
}

json Session::add_tfd(constraints::TemporalFD tfd) {
    require_pipeline();
    const Table& t = tables_[table_index(tfd.table)];
    t.column_index(tfd.time_column);
    for (const auto& g : tfd.grouping) t.column_index(g);
    if (tfd.determined.empty()) throw Error(ErrorCode::InvalidArgument, "a dependency needs determined columns");
    for (const auto& d : tfd.determined) t.column_index(d);
    if (tfd.delta.ns() <= 0) throw Error(ErrorCode::NonPositiveDelta, "delta must be positive");

    auto taken = [&](const std::string& id) {
        return std::any_of(constraints_.begin(), constraints_.end(),
                           [&](const auto& c) { return constraints::constraint_id(c) == id; });
    };
    if (tfd.id.empty()) {
        for (std::size_t n = constraints_.size() + 1;; ++n)
            if (!taken(tfd.id = fmt::format("R{}", n))) break;
    } else if (taken(tfd.id)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("constraint id '{}' is taken", tfd.id));
    }
    record({{"type", "tfd"}, {"tfd", constraints::to_json(tfd)}});
    user_tfds_.push_back(std::move(tfd));
    constraint_stage();
    suggest_stage();
    return pipeline_json();
}

PreviewDiff Session::preview(const std::string& suggestion_id, std::optional<std::uint64_t> generation) const {
    const auto& s = find_suggestion(suggestion_id, generation);
    const Table& t = tables_[table_index(dsl::op_table(s.op))];
    const auto* prof = &profiles_.at(t.name());
    PreviewDiff d;
    d.suggestion_id = s.id;
    std::vector<Table> parts;
    for (const auto& slice : suggest::sample_slices(t, prof, delta_, config_->sample)) {
        auto r = dsl::apply(s.op, slice, prof, config_->bands);
        d.effect += r.effect;
        d.deleted += r.deleted_rows.size();
        d.markers.insert(d.markers.end(), r.markers.begin(), r.markers.end());
        parts.push_back(std::move(r.table));
    }
    d.rows = concat_rows(parts, t.name());
    d.residual_nulls = count_nulls(d.rows);
    return d;
}

dsl::SideEffect Session::apply(const std::string& suggestion_id, std::optional<std::uint64_t> generation) {
    const auto op = find_suggestion(suggestion_id, generation).op;
    return apply_op(op);
}

dsl::SideEffect Session::apply_op(const dsl::WranglingOp& op) {
    const std::string at = now_iso();
    const std::size_t i = table_index(dsl::op_table(op));
    const profiler::TableProfiles* prof = nullptr;
    if (auto it = profiles_.find(tables_[i].name()); it != profiles_.end()) prof = &it->second;
    auto r = dsl::apply(op, tables_[i], prof, config_->bands);
    tables_[i] = std::move(r.table);
    history_.push_back({op, r.effect, at});
    record({{"type", "apply"}, {"op", dsl::render_op(op)}, {"at", at}});
    if (phase_ >= Phase::Suggested) {
        suggest_stage();
    } else {
        ++generation_;
    }
    return r.effect;
}

void Session::skip(const std::string& suggestion_id, std::optional<std::uint64_t> generation) {
    const std::string op = dsl::render_op(find_suggestion(suggestion_id, generation).op);
    skipped_.insert(op);
    record({{"type", "skip"}, {"op", op}});
    rank_stage();
}

explain::Explanation Session::explanation(const std::string& suggestion_id) const {
    return explain::explain(find_suggestion(suggestion_id, std::nullopt), reports_, constraints_, profiles_);
}

JoinSummary Session::join(JoinRequest request) {
    const Table& left = tables_[table_index(request.left)];
    const Table& right = tables_[table_index(request.right)];
    if (request.on.empty()) {
        for (const auto& j : joins_) {
            if (j.left_table == request.left && j.right_table == request.right) {
                request.on.push_back({j.left_column, j.right_column});
                break;
            }
            if (j.left_table == request.right && j.right_table == request.left) {
                request.on.push_back({j.right_column, j.left_column});
                break;
            }
        }
        if (request.on.empty())
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("no join columns proposed for '{}' and '{}'", request.left, request.right));
    }
    if (request.name.empty()) request.name = request.left + "_" + request.right;
    for (const auto& t : tables_)
        if (t.name() == request.name)
            throw Error(ErrorCode::NameTaken, fmt::format("'{}' names an uploaded table", request.name));

    auto result = join_tables(left, right, request.on, request.kind, request.name, config_->join_floor);
    auto it = std::find_if(joined_.begin(), joined_.end(), [&](const Table& t) { return t.name() == request.name; });
    if (it != joined_.end())
        *it = result.table;
    else
        joined_.push_back(result.table);
    if (result.keys_not_aligned)
        log_.push_back(fmt::format("join '{}' matched {:.0f}% of rows: keys not aligned", request.name,
                                   result.match_fraction * 100));
    record({{"type", "join"},
            {"left", request.left},
            {"right", request.right},
            {"on", on_json(request.on)},
            {"kind", to_string(request.kind)},
            {"name", request.name}});
    if (phase_ >= Phase::Suggested) phase_ = Phase::Joined;
    return {std::move(result), std::move(request.on)};
}

std::string Session::export_table(std::string_view name) const { return export_csv(table(name)); }

std::string Session::script() const {
    std::vector<dsl::WranglingOp> ops;
    for (const auto& h : history_) ops.push_back(h.op);
    return dsl::render_script(ops);
}

json Session::suggestions_json() const {
    json list = json::array();
    for (const auto& s : suggestions_) list.push_back(suggest::to_json(s));
    std::size_t violations = 0;
    for (const auto& r : reports_) violations += r.total_degree;
    std::string message;
    if (suggestions_.empty())
        message = violations == 0 ? "no violations" : "no suggestion fits the side-effect budget";
    json reports = json::array();
    for (const auto& r : reports_) reports.push_back(constraints::to_json(r));
    return {{"session", id_},
            {"generation", generation_},
            {"phase", to_string(phase_)},
            {"policy", suggest::to_json(policy_)},
            {"max_row_fraction", max_row_fraction_.to_string()},
            {"total_violations", violations},
            {"suggestions", list},
            {"reports", reports},
            {"message", message}};
}

json Session::pipeline_json() const {
    json profiles = json::array();
    for (const auto& t : tables_) profiles.push_back(session::to_json(profiles_.at(t.name())));
    json joins = json::array();
    for (const auto& j : joins_) joins.push_back(constraints::to_json(j));
    json cons = json::array();
    for (const auto& c : constraints_) {
        json cj = constraints::to_json(c);
        cj["text"] = constraints::describe(c);
        cons.push_back(std::move(cj));
    }
    json delta = {{"chosen", format_duration(delta_)}, {"confirmed", confirmed_delta_.has_value()}};
    if (detection_) {
        json scores = json::array();
        for (const auto& s : detection_->scores)
            scores.push_back({{"delta", format_duration(s.delta)}, {"score", s.score}});
        delta["detected"] = format_duration(detection_->chosen);
        delta["scores"] = scores;
    }
    json out = suggestions_json();
    out["profiles"] = profiles;
    out["joins"] = joins;
    out["delta"] = delta;
    out["constraints"] = cons;
    out["candidates"] = {{"generated", candidate_count_}, {"after_pruning", pruned_count_}};
    out["log"] = log_;
    return out;
}

json Session::summary_json() const {
    json tables = json::array();
    for (const auto& t : tables_)
        tables.push_back({{"name", t.name()}, {"rows", t.row_count()}, {"columns", t.column_names()}});
    json joined = json::array();
    for (const auto& t : joined_)
        joined.push_back({{"name", t.name()}, {"rows", t.row_count()}, {"columns", t.column_names()}});
    json history = json::array();
    for (const auto& h : history_)
        history.push_back({{"op", dsl::render_op(h.op)}, {"effect", dsl::to_json(h.effect)}, {"at", h.at}});
    return {{"id", id_},
            {"phase", to_string(phase_)},
            {"generation", generation_},
            {"delta", format_duration(delta_)},
            {"policy", suggest::to_json(policy_)},
            {"tables", tables},
            {"joined", joined},
            {"history", history}};
}

json Session::to_json() const {
    json uploads = json::array();
    for (const auto& u : uploads_) uploads.push_back({{"name", u.name}, {"csv", u.csv}});
    return {{"format", 1}, {"id", id_}, {"uploads", uploads}, {"events", events_}};
}

std::unique_ptr<Session> Session::from_json(const json& j, std::shared_ptr<const SessionConfig> config) {
    try {
        if (j.at("format").get<int>() != 1) throw Error(ErrorCode::InvalidArgument, "unsupported session format");
        auto s = std::make_unique<Session>(j.at("id").get<std::string>(), std::move(config));
        std::map<std::string, std::string> csv;
        for (const auto& u : j.at("uploads")) csv[u.at("name").get<std::string>()] = u.at("csv").get<std::string>();
        s->replaying_ = true;
        for (const auto& e : j.at("events")) {
            const auto type = e.at("type").get<std::string>();
            if (type == "upload") {
                const auto name = e.at("name").get<std::string>();
                auto it = csv.find(name);
                if (it == csv.end()) throw Error(ErrorCode::InvalidArgument, "upload event without data");
                s->upload_table(name, it->second);
            } else if (type == "pipeline") {
                s->run_pipeline();
            } else if (type == "policy") {
                s->set_policy(suggest::policy_from_json(e.at("policy")));
            } else if (type == "delta") {
                s->confirm_delta(parse_duration(e.at("delta").get<std::string>()), e.at("force").get<bool>());
            } else if (type == "tfd") {
                s->add_tfd(constraints::tfd_from_json(e.at("tfd")));
            } else if (type == "apply") {
                s->apply_op(dsl::parse_op(e.at("op").get<std::string>()));
                // keep the original wall-clock time
                const auto at = e.at("at").get<std::string>();
                s->history_.back().at = at;
                s->events_.back()["at"] = at;
            } else if (type == "skip") {
                const auto op = e.at("op").get<std::string>();
                s->skipped_.insert(op);
                s->record({{"type", "skip"}, {"op", op}});
                s->rank_stage();
            } else if (type == "join") {
                JoinRequest r;
                r.left = e.at("left").get<std::string>();
                r.right = e.at("right").get<std::string>();
                for (const auto& p : e.at("on")) r.on.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
                r.kind = join_kind_from_string(e.at("kind").get<std::string>());
                r.name = e.at("name").get<std::string>();
                s->join(std::move(r));
            } else {
                throw Error(ErrorCode::InvalidArgument, fmt::format("unknown event type '{}'", type));
            }
        }
        s->replaying_ = false;
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("malformed session document: {}", e.what()));
    }
}

std::string Session::state_digest() const {
    std::string acc = to_json().dump();
    acc += suggestions_json().dump();
    for (const auto& t : tables_) acc += export_csv(t);
    for (const auto& t : joined_) acc += export_csv(t);
    return fmt::format("{:016x}", std::hash<std::string>{}(acc));
}

}  // namespace rfw::session

namespace rfw::session {

std::vector<Table> run_script(const std::vector<std::pair<std::string, std::string>>& inputs, std::string_view script,
                              const SessionConfig& config) {
    std::vector<Table> tables;
    profiler::ProfileCatalog profiles;
    for (const auto& [name, csv] : inputs) {
        Table t = ingest_csv(csv, name, config.csv);
        auto p = profiler::profile_table(t, config.profiler);
        if (const auto* ti = p.time_index(); ti && !is_sorted_by_time(t, ti->column)) t = sort_by_time(t, ti->column);
        profiles.emplace(name, std::move(p));
        tables.push_back(std::move(t));
    }
    for (const auto& op : dsl::parse_script(script)) {
        auto it = std::find_if(tables.begin(), tables.end(), [&](const Table& t) { return t.name() == dsl::op_table(op); });
        if (it == tables.end()) throw Error(ErrorCode::UnknownTable, fmt::format("no table named '{}'", dsl::op_table(op)));
        *it = dsl::apply(op, *it, &profiles.at(it->name()), config.bands).table;
    }
    return tables;
}

}  // namespace rfw::session
