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

#include "rfw/session/store.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw::session {

namespace fs = std::filesystem;

bool valid_session_id(const std::string& id) {
    if (id.size() != 16) return false;
    for (char c : id)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

SessionStore::SessionStore(fs::path dir, std::shared_ptr<const SessionConfig> config)
    : dir_(std::move(dir)), config_(std::move(config)) {
    if (!dir_.empty()) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create data directory {}: {}", dir_.string(), ec.message()));
    }
}

fs::path SessionStore::data_dir_from_env() {
    const char* v = std::getenv("RFW_DATA_DIR");
    return v ? fs::path(v) : fs::path();
}

fs::path SessionStore::file_of(const std::string& id) const { return dir_ / (id + ".json"); }

std::string SessionStore::create() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(map_mutex_);
    std::string id;
    do {
        id = fmt::format("{:016x}", rng());
    } while (sessions_.contains(id) || (!dir_.empty() && fs::exists(file_of(id))));
    auto e = std::make_shared<Entry>();
    e->session = std::make_unique<Session>(id, config_);
    save(*e->session);
    sessions_.emplace(id, std::move(e));
    return id;
}

bool SessionStore::exists(const std::string& id) {
    try {
        entry(id);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& id) {
    std::lock_guard lock(map_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    if (valid_session_id(id) && !dir_.empty()) {
        std::ifstream in(file_of(id), std::ios::binary);
        if (in) {
            std::stringstream ss;
            ss << in.rdbuf();
            auto e = std::make_shared<Entry>();
            try {
                e->session = Session::from_json(nlohmann::json::parse(ss.str()), config_);
            } catch (const nlohmann::json::exception& ex) {
                throw Error(ErrorCode::Io, fmt::format("session file {} is corrupt: {}", id, ex.what()));
            }
            sessions_.emplace(id, e);
            return e;
        }
    }
    throw Error(ErrorCode::UnknownSession, fmt::format("no session '{}'", id));
}

void SessionStore::save(const Session& s) const {
    if (dir_.empty()) return;
    const fs::path target = file_of(s.id());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << s.to_json().dump();
        if (!out) return;  // the in-memory session stays authoritative
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
}

}  // namespace rfw::session
