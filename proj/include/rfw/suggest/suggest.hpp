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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rfw/constraints/constraints.hpp"
#include "rfw/core/rational.hpp"
#include "rfw/core/sampling.hpp"
#include "rfw/dsl/bands.hpp"
#include "rfw/dsl/ops.hpp"
#include "rfw/profiler/backend.hpp"
#include "rfw/profiler/profile.hpp"

namespace rfw::suggest {

struct Candidate {
    dsl::WranglingOp op;
    /// Ids of the constraints that read the op's table.
    std::vector<std::string> target_constraints;
    std::string provenance;

    bool operator==(const Candidate&) const = default;
};

struct BudgetPolicy {
    Rational p{1, 10};
    std::size_t k = 4;

    bool operator==(const BudgetPolicy&) const = default;
};

nlohmann::json to_json(const BudgetPolicy& p);
/// {"p": 0.1 | "1/10" | "10%", "k": 4}; missing fields keep their defaults.
/// Throws InvalidArgument when p is outside [0, 1] or k is zero.
BudgetPolicy policy_from_json(const nlohmann::json& j, BudgetPolicy base = {});

/// Violation degree of one constraint on the sample before and after the op.
struct ConstraintGain {
    std::string constraint_id;
    std::int64_t before = 0;
    std::int64_t after = 0;

    std::int64_t reduction() const { return before - after; }
    bool operator==(const ConstraintGain&) const = default;
};

struct ScoredCandidate {
    Candidate candidate;
    std::int64_t score = 0;
    std::vector<ConstraintGain> gains;
    dsl::SideEffect side_effect;
    /// Generation index, the last tie-break.
    std::size_t order = 0;
    /// Set when the operator failed on the sample; the candidate is then never ranked.
    std::optional<std::string> discarded;
};

struct Suggestion {
    std::string id;
    dsl::WranglingOp op;
    std::int64_t score = 0;
    dsl::SideEffect side_effect;
    std::size_t rank = 0;
    SampleSpec sample_spec;
    std::vector<std::string> target_constraints;
    std::vector<ConstraintGain> gains;
    std::string explanation;

    /// Constraints whose degree the op lowers on the sample.
    std::vector<std::string> satisfied() const;

    bool operator==(const Suggestion&) const = default;
};

nlohmann::json to_json(const Suggestion& s);

struct Ranking {
    std::vector<Suggestion> suggestions;
    /// Largest row fraction among the returned suggestions, 0 when empty.
    Rational max_row_fraction;
};

using TableList = std::vector<const Table*>;

/// Deterministic parameter grid over the six operators, per table in input order.
std::vector<Candidate> generate_candidates(const TableList& tables, const profiler::ProfileCatalog& profiles,
                                           const std::vector<constraints::Constraint>& constraints, Duration delta);

/// Drops candidates whose functions the target column's profile does not allow.
/// A verifier is asked the aggregation question per downsampled column and only
/// agreeing downsample candidates stay; if it fails, profiles alone decide.
std::vector<Candidate> prune_semantic(const std::vector<Candidate>& candidates, const TableList& tables,
                                      const profiler::ProfileCatalog& profiles,
                                      profiler::ProfilerBackend* verifier = nullptr,
                                      std::vector<std::string>* log = nullptr);

/// Sample of one table as separate window slices (the whole table when small).
std::vector<Table> sample_slices(const Table& t, const profiler::TableProfiles* profiles, Duration delta,
                                 const SampleSpec& spec);

/// V(sample) - V(op(sample)) summed over the constraints reading the table,
/// evaluated slice by slice so that gaps between windows never count.
ScoredCandidate score_candidate(const Candidate& c, const std::vector<Table>& slices,
                                const std::vector<constraints::Constraint>& constraints,
                                const constraints::UnitResolver& units,
                                const profiler::TableProfiles* profiles = nullptr,
                                const dsl::BandTable& bands = dsl::BandTable::shipped());

/// Samples each table once and scores every candidate in parallel; the output
/// order always matches the input order.
std::vector<ScoredCandidate> score_all(const std::vector<Candidate>& candidates, const TableList& tables,
                                       const profiler::ProfileCatalog& profiles,
                                       const std::vector<constraints::Constraint>& constraints, Duration delta,
                                       const SampleSpec& spec = {},
                                       const dsl::BandTable& bands = dsl::BandTable::shipped());

/// Filters (score > 0, row_fraction <= p), sorts by score desc, row fraction asc,
/// operator order, generation order; keeps the best candidate per
/// (table, operator, target column); takes k and names them W1..Wk.
Ranking rank_suggestions(const std::vector<ScoredCandidate>& scored, const BudgetPolicy& policy,
                         const SampleSpec& spec = {});

}  // namespace rfw::suggest
