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

#include "rfw/core/error.hpp"

namespace rfw {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::EmptyFile: return "EmptyFile";
        case ErrorCode::NoTimestampColumn: return "NoTimestampColumn";
        case ErrorCode::NonPositiveDelta: return "NonPositiveDelta";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::DuplicateColumn: return "DuplicateColumn";
        case ErrorCode::UnsortedTable: return "UnsortedTable";
        case ErrorCode::NoTimeIndex: return "NoTimeIndex";
        case ErrorCode::NoDeterminedColumns: return "NoDeterminedColumns";
        case ErrorCode::AllTablesSingleRow: return "AllTablesSingleRow";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::MissingAggFn: return "MissingAggFn";
        case ErrorCode::LogMeanOnLinear: return "LogMeanOnLinear";
        case ErrorCode::MethodNotAllowed: return "MethodNotAllowed";
        case ErrorCode::GranularityMismatch: return "GranularityMismatch";
        case ErrorCode::UnknownBand: return "UnknownBand";
        case ErrorCode::AmbiguousBand: return "AmbiguousBand";
        case ErrorCode::UnparseableValue: return "UnparseableValue";
        case ErrorCode::UnsupportedCast: return "UnsupportedCast";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidOp: return "InvalidOp";
        case ErrorCode::ScriptSyntax: return "ScriptSyntax";
        case ErrorCode::ConfigSyntax: return "ConfigSyntax";
        case ErrorCode::NameTaken: return "NameTaken";
        case ErrorCode::UnknownTable: return "UnknownTable";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::UnknownSuggestion: return "UnknownSuggestion";
        case ErrorCode::StaleSuggestion: return "StaleSuggestion";
        case ErrorCode::InvalidDelta: return "InvalidDelta";
        case ErrorCode::InvalidPhase: return "InvalidPhase";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(message), code_(code), row_(row) {}

}  // namespace rfw
