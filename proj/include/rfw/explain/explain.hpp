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
#include <utility>
#include <vector>

#include "json.hpp"

#include "rfw/constraints/constraints.hpp"
#include "rfw/profiler/profile.hpp"
#include "rfw/suggest/suggest.hpp"

namespace rfw::explain {

struct Fact {
    std::string kind;
    std::string value;

    bool operator==(const Fact&) const = default;
};

struct Explanation {
    std::string suggestion_id;
    std::string brief;
    std::string detailed;
    /// Every value substituted into brief or detailed, in order of first use.
    std::vector<Fact> facts;
};

nlohmann::json to_json(const Explanation& e);

enum class Depth { Brief, Detailed };
/// "brief" | "detailed"; throws InvalidArgument.
Depth depth_from_string(std::string_view s);

/// key -> template with {named} placeholders.
class Templates {
public:
    /// The versioned resource compiled into the library.
    static const Templates& shipped();
    /// Lines "key = text"; '#' starts a comment line. Throws ConfigSyntax.
    static Templates parse(std::string_view text);

    bool has(std::string_view key) const;
    /// Throws ConfigSyntax for unknown keys or placeholders without a value.
    std::string render(std::string_view key, const std::vector<std::pair<std::string, std::string>>& args) const;

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

/// Reports are the current ones on the full tables; the ones belonging to
/// constraints outside the suggestion are ignored.
Explanation explain(const suggest::Suggestion& s, const std::vector<constraints::ViolationReport>& reports,
                    const std::vector<constraints::Constraint>& constraints,
                    const profiler::ProfileCatalog& profiles, const Templates& templates = Templates::shipped());

std::string explain_brief(const suggest::Suggestion& s, const std::vector<constraints::ViolationReport>& reports,
                          const Templates& templates = Templates::shipped());

std::string explain_detailed(const suggest::Suggestion& s, const std::vector<constraints::ViolationReport>& reports,
                             const std::vector<constraints::Constraint>& constraints,
                             const profiler::ProfileCatalog& profiles,
                             const Templates& templates = Templates::shipped());

/// Nearest integer percent, halves up.
std::string percent(const Rational& r);
/// Nearest tenth of a percent, halves up.
std::string percent_one_decimal(const Rational& r);

}  // namespace rfw::explain
