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

#include <memory>
#include <string_view>

#include "rfw/core/table.hpp"
#include "rfw/profiler/backend.hpp"
#include "rfw/profiler/profile.hpp"

namespace rfw::profiler {

enum class BackendKind { Heuristic, Llm, Fixture };

struct ProfilerConfig {
    BackendKind kind = BackendKind::Heuristic;
    /// Required for Llm and Fixture kinds.
    std::shared_ptr<ProfilerBackend> backend;
    KeywordConfig keywords = KeywordConfig::defaults();
};

/// Asks the unit, broad-type and role questions (one retry on out-of-vocabulary
/// answers, then the heuristic answers) and synthesizes strategies. A column with
/// a declared unit keeps it without asking.
SemanticProfile profile_column(const Table& t, std::string_view column, const ProfilerConfig& config);

/// Profiles every column and enforces at most one TimeIndex per table: the
/// Timestamp-typed column with a time-like name wins, else the first one.
TableProfiles profile_table(const Table& t, const ProfilerConfig& config);

}  // namespace rfw::profiler
