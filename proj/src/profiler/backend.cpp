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

#include "rfw/profiler/backend.hpp"

#include <cstdlib>

#include <fmt/format.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "rfw/core/error.hpp"

namespace rfw::profiler {
namespace {

std::optional<QuestionKind> question_from_string(std::string_view s) {
    for (auto q : {QuestionKind::Unit, QuestionKind::BroadType, QuestionKind::Role, QuestionKind::Aggregation})
        if (to_string(q) == s) return q;
    return std::nullopt;
}

}  // namespace

std::string HeuristicBackend::answer(QuestionKind question, std::string_view, const ColumnEvidence& evidence) {
    return heuristic_answer(question, evidence, keywords_);
}

std::shared_ptr<FixtureBackend> FixtureBackend::from_json(std::string_view json_text) {
    auto backend = std::make_shared<FixtureBackend>();
    try {
        const auto doc = nlohmann::json::parse(json_text);
        for (const auto& item : doc.at("answers")) {
            const auto q = question_from_string(item.at("question").get<std::string>());
            if (!q) throw Error(ErrorCode::ConfigSyntax, "unknown question " + item.at("question").dump());
            std::vector<std::string> answers;
            const auto& a = item.at("answer");
            if (a.is_array())
                answers = a.get<std::vector<std::string>>();
            else
                answers.push_back(a.get<std::string>());
            backend->record(*q, item.at("column").get<std::string>(), std::move(answers));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigSyntax, fmt::format("fixture backend: {}", e.what()));
    }
    return backend;
}

void FixtureBackend::record(QuestionKind question, std::string column, std::vector<std::string> answers) {
    std::lock_guard lock(mutex_);
    answers_[{question, std::move(column)}] = std::move(answers);
}

std::string FixtureBackend::answer(QuestionKind question, std::string_view rendered_prompt,
                                   const ColumnEvidence& evidence) {
    std::lock_guard lock(mutex_);
    prompts_.emplace_back(rendered_prompt);
    const auto key = std::make_pair(question, evidence.name);
    auto it = answers_.find(key);
    if (it == answers_.end() || it->second.empty())
        throw Error(ErrorCode::BackendUnavailable,
                    fmt::format("no recorded {} answer for column '{}'", to_string(question), evidence.name));
    std::size_t& i = cursor_[key];
    const std::string& out = it->second[std::min(i, it->second.size() - 1)];
    ++i;
    return out;
}

std::vector<std::string> FixtureBackend::prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

LlmBackend::LlmBackend(LlmConfig config) : config_(std::move(config)) {
    const auto scheme = config_.endpoint.find("://");
    if (scheme == std::string::npos) throw Error(ErrorCode::InvalidArgument, "LLM endpoint must be a full URL");
    const auto path = config_.endpoint.find('/', scheme + 3);
    scheme_host_ = config_.endpoint.substr(0, path);
    path_ = path == std::string::npos ? "/" : config_.endpoint.substr(path);
}

std::string LlmBackend::answer(QuestionKind, std::string_view rendered_prompt, const ColumnEvidence&) {
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);

    httplib::Headers headers;
    if (!config_.api_key_env.empty())
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

    const nlohmann::json body = {
        {"model", config_.model},
        {"temperature", 0},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(rendered_prompt)}}})},
    };
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::BackendUnavailable, "LLM request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorCode::BackendUnavailable, fmt::format("LLM endpoint returned HTTP {}", res->status));
    try {
        const auto doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, fmt::format("malformed LLM response: {}", e.what()));
    }
}

}  // namespace rfw::profiler
