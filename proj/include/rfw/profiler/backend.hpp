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
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfw/profiler/evidence.hpp"

namespace rfw::profiler {

/// Answers one profiling question. Implementations must tolerate concurrent calls.
/// Transport failures are reported as Error(BackendUnavailable).
class ProfilerBackend {
public:
    virtual ~ProfilerBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string answer(QuestionKind question, std::string_view rendered_prompt,
                               const ColumnEvidence& evidence) = 0;
};

class HeuristicBackend final : public ProfilerBackend {
public:
    explicit HeuristicBackend(KeywordConfig keywords = KeywordConfig::defaults()) : keywords_(std::move(keywords)) {}
    std::string name() const override { return "heuristic"; }
    std::string answer(QuestionKind question, std::string_view rendered_prompt,
                       const ColumnEvidence& evidence) override;

private:
    KeywordConfig keywords_;
};

/// Replays recorded answers keyed by (question, column). Repeated calls walk the
/// recorded list and stick at its last entry. Unrecorded keys raise BackendUnavailable.
///
/// JSON form: {"answers": [{"question": "unit", "column": "chan", "answer": "EARFCN"}, ...]}
/// where "answer" may also be a list of strings.
class FixtureBackend final : public ProfilerBackend {
public:
    FixtureBackend() = default;
    static std::shared_ptr<FixtureBackend> from_json(std::string_view json_text);

    void record(QuestionKind question, std::string column, std::vector<std::string> answers);
    std::string name() const override { return "fixture"; }
    std::string answer(QuestionKind question, std::string_view rendered_prompt,
                       const ColumnEvidence& evidence) override;

    /// Prompts seen so far, in call order.
    std::vector<std::string> prompts() const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<QuestionKind, std::string>, std::vector<std::string>> answers_;
    std::map<std::pair<QuestionKind, std::string>, std::size_t> cursor_;
    std::vector<std::string> prompts_;
};

struct LlmConfig {
    /// Full URL of an OpenAI-compatible chat-completions endpoint.
    std::string endpoint;
    std::string model;
    /// Name of the environment variable holding the API key (may be empty).
    std::string api_key_env;
    int timeout_seconds = 30;
};

/// Sends the rendered prompt as a single user message and returns the first
/// choice's content.
class LlmBackend final : public ProfilerBackend {
public:
    explicit LlmBackend(LlmConfig config);
    std::string name() const override { return "llm"; }
    std::string answer(QuestionKind question, std::string_view rendered_prompt,
                       const ColumnEvidence& evidence) override;

private:
    LlmConfig config_;
    std::string scheme_host_;
    std::string path_;
};

}  // namespace rfw::profiler
