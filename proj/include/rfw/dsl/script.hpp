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

#include <string>
#include <string_view>
#include <vector>

#include "rfw/dsl/ops.hpp"

namespace rfw::dsl {

/// One line per op, key=value tokens:
///     impute table=RF col=RSRP method=ffill group_by=frequency
std::string render_op(const WranglingOp& op);
std::string render_script(const std::vector<WranglingOp>& ops);

/// '#' comments and blank lines are ignored. Throws ScriptSyntax with the line number.
std::vector<WranglingOp> parse_script(std::string_view text);
WranglingOp parse_op(std::string_view line);

}  // namespace rfw::dsl
