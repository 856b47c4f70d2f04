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
#include <limits>

#include "json.hpp"

#include "rfw/core/table.hpp"
#include "rfw/profiler/profile.hpp"

namespace rfw::session {

/// null, integer, number, string; timestamps as ISO 8601 with milliseconds.
nlohmann::json cell_to_json(const Cell& c);

/// {"name", "row_count", "columns": [{"name", "type", "unit"?}], "rows": [[...], ...]}
nlohmann::json table_to_json(const Table& t, std::size_t max_rows = std::numeric_limits<std::size_t>::max());

nlohmann::json to_json(const profiler::SemanticProfile& p);
nlohmann::json to_json(const profiler::TableProfiles& p);

}  // namespace rfw::session
