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
#include <string>

#include "json.hpp"

#include "rfw/core/error.hpp"
#include "rfw/session/store.hpp"

namespace httplib {
class Server;
}

namespace rfw::session {

/// HTTP status for a library error code.
int http_status(ErrorCode code);
/// {"error": <code>, "message": ..., "row"?: n}
nlohmann::json error_body(const Error& e);

/// JSON API over a SessionStore.
class ApiServer {
public:
    explicit ApiServer(std::shared_ptr<SessionStore> store);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds and blocks until stop(). port 0 picks a free port.
    bool listen(const std::string& host, int port);
    /// Binds without serving; returns the port or -1.
    int bind(const std::string& host, int port = 0);
    /// Serves on a socket from bind(); blocks.
    bool serve();
    void stop();
    bool running() const;

private:
    void routes();

    std::shared_ptr<SessionStore> store_;
    std::unique_ptr<httplib::Server> http_;
};

}  // namespace rfw::session
