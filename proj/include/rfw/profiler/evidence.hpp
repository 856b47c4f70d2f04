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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfw/core/semantics.hpp"
#include "rfw/core/table.hpp"

namespace rfw::profiler {

/// What a backend gets to see about a column.
struct ColumnEvidence {
    std::string table;
    std::string name;
    ColumnType type = ColumnType::Text;
    std::optional<double> min;
    std::optional<double> max;
    std::size_t distinct_count = 0;
    std::size_t row_count = 0;
    std::size_t non_null_count = 0;
    /// First 20 non-null values, rendered.
    std::vector<std::string> samples;
    bool all_integer = false;  // every non-null value is an integral number
    bool all_hex = false;      // every non-null value is a 0x-prefixed hex string
    std::vector<std::string> siblings;
    /// Answer of the unit question, available to the later questions.
    std::optional<Unit> unit;
};

inline constexpr std::size_t k_evidence_samples = 20;

/// Throws UnknownColumn.
ColumnEvidence gather_evidence(const Table& t, std::string_view column);

struct UnitKeywords {
    Unit unit;
    std::vector<std::string> keywords;
    std::optional<std::pair<double, double>> range;
};

/// Unit -> column-name keywords. Text format, one unit per line:
///     <unit name> = kw1, kw2, ... [@ lo..hi]
/// '#' starts a comment. Unknown unit names become custom units.
struct KeywordConfig {
    std::vector<UnitKeywords> entries;

    static KeywordConfig defaults();
    /// Throws ConfigSyntax.
    static KeywordConfig parse(std::string_view text);
    /// Adds or replaces entries from `other`.
    void merge(const KeywordConfig& other);

    /// Closed vocabulary for the unit question, built-ins first then custom units.
    std::vector<std::string> vocabulary() const;
};

enum class QuestionKind { Unit, BroadType, Role, Aggregation };

std::string_view to_string(QuestionKind q);

/// Deterministic stand-in for the LLM; answers in the same vocabulary.
std::string heuristic_answer(QuestionKind question, const ColumnEvidence& evidence, const KeywordConfig& keywords);

/// Prompt text for a question, instantiated with the evidence.
std::string render_prompt(QuestionKind question, const ColumnEvidence& evidence, const KeywordConfig& keywords);

/// Closed-vocabulary parsers; nullopt for anything outside the vocabulary.
std::optional<Unit> parse_unit_answer(std::string_view answer, const KeywordConfig& keywords);
std::optional<BroadType> parse_broad_type_answer(std::string_view answer);
std::optional<ColumnRole> parse_role_answer(std::string_view answer);
std::optional<AggFn> parse_aggregation_answer(std::string_view answer);

namespace detail {
/// Heuristic unit plus the rule that produced it.
std::pair<Unit, std::string> heuristic_unit(const ColumnEvidence& e, const KeywordConfig& keywords);
BroadType heuristic_broad_type(const ColumnEvidence& e);
ColumnRole heuristic_role(const ColumnEvidence& e, BroadType broad);
}  // namespace detail

}  // namespace rfw::profiler
