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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rfw/core/semantics.hpp"

namespace rfw::profiler {

struct SemanticProfile {
    std::string column;
    Unit unit;
    BroadType broad_type = BroadType::Categorical;
    ColumnRole role = ColumnRole::Grouping;
    std::vector<AggFn> allowed_aggregations;
    std::vector<ImputeFn> allowed_imputations;
    std::vector<Unit> cast_targets;
    Scale scale = Scale::Linear;
    /// 1.0 for name-keyword evidence, lower for value-shape guesses.
    double confidence = 1.0;
    /// Which backend answered, fallbacks taken, precedence decisions.
    std::vector<std::string> provenance;

    bool allows(AggFn f) const;
    bool allows(const ImputeFn& f) const;
};

/// Profiles of one table, in column order.
struct TableProfiles {
    std::string table;
    std::vector<SemanticProfile> columns;

    const SemanticProfile* find(std::string_view column) const;
    const SemanticProfile* time_index() const;
    std::vector<std::string> columns_with_role(ColumnRole role) const;
};

using ProfileCatalog = std::map<std::string, TableProfiles, std::less<>>;

struct Strategies {
    std::vector<AggFn> allowed_aggregations;
    std::vector<ImputeFn> allowed_imputations;
    std::vector<Unit> cast_targets;
    Scale scale = Scale::Linear;
};

/// Strategy table: logarithmic units aggregate by LogMean, positions forward-fill,
/// channel numbers cast to MHz, grouping columns never aggregate.
Strategies synthesize_strategies(const Unit& unit, BroadType broad_type, ColumnRole role);

}  // namespace rfw::profiler
