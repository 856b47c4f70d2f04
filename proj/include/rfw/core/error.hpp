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
#include <stdexcept>
#include <string>
#include <string_view>

namespace rfw {

enum class ErrorCode {
    MalformedCsv,
    EmptyFile,
    NoTimestampColumn,
    NonPositiveDelta,
    UnknownColumn,
    DuplicateColumn,
    UnsortedTable,
    NoTimeIndex,
    NoDeterminedColumns,
    AllTablesSingleRow,
    BackendUnavailable,
    MissingAggFn,
    LogMeanOnLinear,
    MethodNotAllowed,
    GranularityMismatch,
    UnknownBand,
    AmbiguousBand,
    UnparseableValue,
    UnsupportedCast,
    EmptyInput,
    InvalidOp,
    ScriptSyntax,
    ConfigSyntax,
    NameTaken,
    UnknownTable,
    UnknownSession,
    UnknownSuggestion,
    StaleSuggestion,
    InvalidDelta,
    InvalidPhase,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Exception type used across the library. `row()` is set for errors that
/// can be pinned to an input line (CSV ingestion, script parsing).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> row_;
};

}  // namespace rfw
