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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "rfw/constraints/constraints.hpp"
#include "rfw/core/csv.hpp"
#include "rfw/dsl/bands.hpp"
#include "rfw/dsl/exec.hpp"
#include "rfw/explain/explain.hpp"
#include "rfw/profiler/profiler.hpp"
#include "rfw/session/join.hpp"
#include "rfw/suggest/suggest.hpp"

namespace rfw::session {

enum class Phase { Uploaded, Profiled, ConstraintsConfirmed, Suggested, Joined };
std::string_view to_string(Phase p);

struct SessionConfig {
    profiler::ProfilerConfig profiler;
    /// Asked to confirm aggregation choices when set.
    std::shared_ptr<profiler::ProfilerBackend> verifier;
    dsl::BandTable bands = dsl::BandTable::shipped();
    SampleSpec sample;
    std::vector<Duration> delta_candidates = constraints::default_delta_candidates();
    /// Joins matching less than this share of the smaller table warn.
    double join_floor = 0.5;
    CsvOptions csv;
};

struct HistoryEntry {
    dsl::WranglingOp op;
    dsl::SideEffect effect;
    std::string at;  // ISO 8601, UTC
};

struct PreviewDiff {
    std::string suggestion_id;
    /// The sample after the hypothetical apply.
    Table rows;
    std::vector<dsl::RowMarker> markers;
    std::size_t deleted = 0;
    std::size_t residual_nulls = 0;
    dsl::SideEffect effect;
};

nlohmann::json to_json(const PreviewDiff& d);

struct JoinRequest {
    std::string left;
    std::string right;
    /// Empty: the confirmed join columns of the two tables.
    std::vector<std::pair<std::string, std::string>> on;
    JoinKind kind = JoinKind::Inner;
    /// Empty: "<left>_<right>".
    std::string name;
};

struct JoinSummary {
    JoinResult result;
    std::vector<std::pair<std::string, std::string>> on;
};

nlohmann::json to_json(const JoinSummary& j);

/// One wrangling session. Not thread-safe; SessionStore serializes writers.
/// State is event-sourced: uploads plus an ordered event log, replayed by from_json.
class Session {
public:
    Session(std::string id, std::shared_ptr<const SessionConfig> config);

    const std::string& id() const noexcept { return id_; }
    Phase phase() const noexcept { return phase_; }

    /// Throws NameTaken, InvalidPhase (after the pipeline ran), ingestion errors.
    nlohmann::json upload_table(const std::string& name, std::string csv);

    /// Profiles, proposes joins, detects delta, synthesizes constraints, ranks.
    nlohmann::json run_pipeline();
    nlohmann::json set_policy(const suggest::BudgetPolicy& policy);
    /// Throws InvalidDelta unless delta is a candidate or forced.
    nlohmann::json confirm_delta(Duration delta, bool force = false);
    /// An empty id is replaced by the next free "R<n>". Throws UnknownTable, UnknownColumn, InvalidArgument.
    nlohmann::json add_tfd(constraints::TemporalFD tfd);

    /// A generation other than the current one throws StaleSuggestion.
    PreviewDiff preview(const std::string& suggestion_id, std::optional<std::uint64_t> generation = std::nullopt) const;
    dsl::SideEffect apply(const std::string& suggestion_id, std::optional<std::uint64_t> generation = std::nullopt);
    void skip(const std::string& suggestion_id, std::optional<std::uint64_t> generation = std::nullopt);
    /// Runs an op on the full table outside the suggestion list (scripts, replay).
    dsl::SideEffect apply_op(const dsl::WranglingOp& op);

    explain::Explanation explanation(const std::string& suggestion_id) const;

    JoinSummary join(JoinRequest request);
    /// Base or joined table as CSV. Throws UnknownTable.
    std::string export_table(std::string_view name) const;
    std::string script() const;

    nlohmann::json suggestions_json() const;
    /// Everything run_pipeline returns, for the current state.
    nlohmann::json pipeline_json() const;
    nlohmann::json summary_json() const;

    const std::vector<Table>& tables() const noexcept { return tables_; }
    const Table& table(std::string_view name) const;
    const profiler::ProfileCatalog& profiles() const noexcept { return profiles_; }
    const std::vector<constraints::Constraint>& constraints() const noexcept { return constraints_; }
    const std::vector<constraints::ViolationReport>& reports() const noexcept { return reports_; }
    const std::vector<suggest::Suggestion>& suggestions() const noexcept { return suggestions_; }
    const std::vector<HistoryEntry>& history() const noexcept { return history_; }
    std::uint64_t generation() const noexcept { return generation_; }
    Duration delta() const noexcept { return delta_; }
    const suggest::BudgetPolicy& policy() const noexcept { return policy_; }
    const std::optional<constraints::DeltaDetection>& delta_detection() const noexcept { return detection_; }

    /// Persisted form: uploads verbatim plus the event log.
    nlohmann::json to_json() const;
    /// Replays a persisted session. Throws InvalidArgument on malformed input.
    static std::unique_ptr<Session> from_json(const nlohmann::json& j, std::shared_ptr<const SessionConfig> config);

    /// Changes whenever any observable state changes.
    std::string state_digest() const;

private:
    struct Upload {
        std::string name;
        std::string csv;
    };

    void record(nlohmann::json event);
    void require_pipeline() const;
    const suggest::Suggestion& find_suggestion(const std::string& id, std::optional<std::uint64_t> generation) const;
    std::size_t table_index(std::string_view name) const;
    suggest::TableList table_list() const;

    void profile_stage();
    void constraint_stage();
    void suggest_stage();
    void rank_stage();
    void report_stage();

    std::string id_;
    std::shared_ptr<const SessionConfig> config_;
    Phase phase_ = Phase::Uploaded;
    std::vector<Upload> uploads_;
    nlohmann::json events_ = nlohmann::json::array();
    bool replaying_ = false;

    std::vector<Table> tables_;
    std::vector<Table> joined_;
    profiler::ProfileCatalog profiles_;
    std::vector<constraints::JoinProposal> joins_;
    std::optional<constraints::DeltaDetection> detection_;
    Duration delta_;
    std::optional<Duration> confirmed_delta_;
    std::vector<constraints::TemporalFD> user_tfds_;
    std::vector<constraints::Constraint> constraints_;
    std::vector<constraints::ViolationReport> reports_;
    suggest::BudgetPolicy policy_;
    std::size_t candidate_count_ = 0;
    std::size_t pruned_count_ = 0;
    std::vector<suggest::ScoredCandidate> scored_;
    std::vector<suggest::Suggestion> suggestions_;
    Rational max_row_fraction_;
    std::set<std::string> skipped_;  // rendered ops
    std::vector<HistoryEntry> history_;
    std::vector<std::string> log_;
    std::uint64_t generation_ = 0;
};

}  // namespace rfw::session

namespace rfw::session {

/// Batch replay: ingests and profiles the inputs as a session would, then
/// applies each script line in order. Returns the tables in input order.
std::vector<Table> run_script(const std::vector<std::pair<std::string, std::string>>& inputs, std::string_view script,
                              const SessionConfig& config = {});

}  // namespace rfw::session
