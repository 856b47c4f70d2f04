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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "rfw/session/session.hpp"

namespace rfw::session {

/// Sessions by id, one JSON file each under the data directory.
/// Writers on one session are serialized; readers share its lock.
/// Different sessions never contend beyond the map lookup.
class SessionStore {
public:
    /// An empty dir keeps sessions in memory only.
    SessionStore(std::filesystem::path dir, std::shared_ptr<const SessionConfig> config);

    /// Directory named by RFW_DATA_DIR, else empty.
    static std::filesystem::path data_dir_from_env();

    std::string create();
    bool exists(const std::string& id);

    /// Throws UnknownSession.
    template <class F>
    auto read(const std::string& id, F&& f) {
        auto e = entry(id);
        std::shared_lock lock(e->mutex);
        return f(static_cast<const Session&>(*e->session));
    }

    /// Persists after f returns, also when f throws part way through a change.
    template <class F>
    auto write(const std::string& id, F&& f) {
        auto e = entry(id);
        std::unique_lock lock(e->mutex);
        struct Saver {
            SessionStore* store;
            Entry* e;
            ~Saver() { store->save(*e->session); }
        } saver{this, e.get()};
        return f(*e->session);
    }

private:
    struct Entry {
        std::shared_mutex mutex;
        std::unique_ptr<Session> session;
    };

    std::shared_ptr<Entry> entry(const std::string& id);
    std::filesystem::path file_of(const std::string& id) const;
    void save(const Session& s) const;

    std::filesystem::path dir_;
    std::shared_ptr<const SessionConfig> config_;
    std::mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

/// 16 lowercase hex digits.
bool valid_session_id(const std::string& id);

}  // namespace rfw::session
