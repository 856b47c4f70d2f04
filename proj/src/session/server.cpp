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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "rfw/session/server.hpp"

#include <fmt/format.h>

#include "rfw/dsl/script.hpp"
#include "rfw/explain/explain.hpp"
#include "rfw/suggest/suggest.hpp"

namespace rfw::session {

using nlohmann::json;

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownSuggestion:
        case ErrorCode::UnknownTable: return 404;
        case ErrorCode::StaleSuggestion:
        case ErrorCode::NameTaken:
        case ErrorCode::InvalidPhase: return 409;
        case ErrorCode::BackendUnavailable: return 503;
        case ErrorCode::Io: return 500;
        default: return 400;
    }
}

json error_body(const Error& e) {
    json j = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (e.row()) j["row"] = *e.row();
    return j;
}

namespace {

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

void send_json(httplib::Response& res, const json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

// Every handler reports library errors as JSON bodies.
Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
        try {
            h(req, res);
        } catch (const Error& e) {
            send_json(res, error_body(e), http_status(e.code()));
        } catch (const json::exception& e) {
            send_json(res, {{"error", "InvalidArgument"}, {"message", fmt::format("bad JSON: {}", e.what())}}, 400);
        } catch (const std::exception& e) {
            send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
        }
    };
}

json body_json(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return j;
}

std::optional<std::uint64_t> generation_of(const httplib::Request& req, const json& body) {
    if (body.contains("generation")) return body.at("generation").get<std::uint64_t>();
    if (!req.has_param("generation")) return std::nullopt;
    const std::string v = req.get_param_value("generation");
    try {
        std::size_t used = 0;
        const auto g = std::stoull(v, &used);
        if (used == v.size()) return g;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("generation must be a number, not '{}'", v));
}

bool is_json(const httplib::Request& req) {
    return req.get_header_value("Content-Type").starts_with("application/json");
}

}  // namespace

ApiServer::ApiServer(std::shared_ptr<SessionStore> store)
    : store_(std::move(store)), http_(std::make_unique<httplib::Server>()) {
    routes();
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::listen(const std::string& host, int port) { return http_->listen(host, port); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return http_->bind_to_any_port(host);
    return http_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::serve() { return http_->listen_after_bind(); }

void ApiServer::stop() {
    if (http_) http_->stop();
}

bool ApiServer::running() const { return http_->is_running(); }

void ApiServer::routes() {
    auto& s = *http_;
    auto store = store_;
    const std::string sid = "/sessions/([0-9a-zA-Z]+)";
    const std::string wid = "/suggestions/([0-9A-Za-z]+)";

    s.Post("/sessions", guarded([store](const httplib::Request&, httplib::Response& res) {
               send_json(res, {{"id", store->create()}}, 201);
           }));

    s.Post(sid + "/tables", guarded([store](const httplib::Request& req, httplib::Response& res) {
               std::string name, csv;
               if (is_json(req)) {
                   const json b = body_json(req);
                   name = b.at("name").get<std::string>();
                   csv = b.at("csv").get<std::string>();
               } else {
                   name = req.get_param_value("name");
                   csv = req.body;
               }
               if (name.empty()) throw Error(ErrorCode::InvalidArgument, "table name missing");
               auto out = store->write(req.matches[1], [&](Session& ss) { return ss.upload_table(name, csv); });
               send_json(res, out, 201);
           }));

    s.Post(sid + "/pipeline", guarded([store](const httplib::Request& req, httplib::Response& res) {
               send_json(res, store->write(req.matches[1], [](Session& ss) { return ss.run_pipeline(); }));
           }));

    s.Get(sid + "/suggestions", guarded([store](const httplib::Request& req, httplib::Response& res) {
              send_json(res, store->read(req.matches[1], [](const Session& ss) { return ss.suggestions_json(); }));
          }));

    s.Post(sid + "/policy", guarded([store](const httplib::Request& req, httplib::Response& res) {
               const json b = body_json(req);
               send_json(res, store->write(req.matches[1], [&](Session& ss) {
                   return ss.set_policy(suggest::policy_from_json(b, ss.policy()));
               }));
           }));

    s.Post(sid + "/delta", guarded([store](const httplib::Request& req, httplib::Response& res) {
               const json b = body_json(req);
               const Duration d = parse_duration(b.at("delta").get<std::string>());
               const bool force = b.value("force", false);
               send_json(res, store->write(req.matches[1], [&](Session& ss) { return ss.confirm_delta(d, force); }));
           }));

    s.Post(sid + "/tfds", guarded([store](const httplib::Request& req, httplib::Response& res) {
               json b = body_json(req);
               if (b.contains("delta") && !b.contains("delta_ns"))
                   b["delta_ns"] = parse_duration(b.at("delta").get<std::string>()).ns();
               auto tfd = constraints::tfd_from_json(b);
               send_json(res, store->write(req.matches[1], [&](Session& ss) { return ss.add_tfd(std::move(tfd)); }));
           }));

    s.Get(sid + wid + "/preview", guarded([store](const httplib::Request& req, httplib::Response& res) {
              const auto g = generation_of(req, json::object());
              send_json(res, store->read(req.matches[1], [&](const Session& ss) {
                  return to_json(ss.preview(req.matches[2], g));
              }));
          }));

    s.Post(sid + wid + "/apply", guarded([store](const httplib::Request& req, httplib::Response& res) {
               const auto g = generation_of(req, body_json(req));
               send_json(res, store->write(req.matches[1], [&](Session& ss) {
                   const auto effect = ss.apply(req.matches[2], g);
                   json out = ss.suggestions_json();
                   out["applied"] = dsl::render_op(ss.history().back().op);
                   out["effect"] = dsl::to_json(effect);
                   return out;
               }));
           }));

    s.Post(sid + wid + "/skip", guarded([store](const httplib::Request& req, httplib::Response& res) {
               const auto g = generation_of(req, body_json(req));
               send_json(res, store->write(req.matches[1], [&](Session& ss) {
                   ss.skip(req.matches[2], g);
                   return ss.suggestions_json();
               }));
           }));

    s.Get(sid + wid + "/explanation", guarded([store](const httplib::Request& req, httplib::Response& res) {
              const auto depth = explain::depth_from_string(req.has_param("depth") ? req.get_param_value("depth") : "brief");
              send_json(res, store->read(req.matches[1], [&](const Session& ss) {
                  const auto e = ss.explanation(req.matches[2]);
                  json j = explain::to_json(e);
                  j["depth"] = depth == explain::Depth::Brief ? "brief" : "detailed";
                  j["text"] = depth == explain::Depth::Brief ? e.brief : e.detailed;
                  if (depth == explain::Depth::Brief) j.erase("detailed");
                  return j;
              }));
          }));

    s.Post(sid + "/join", guarded([store](const httplib::Request& req, httplib::Response& res) {
               const json b = body_json(req);
               JoinRequest r;
               r.left = b.at("left").get<std::string>();
               r.right = b.at("right").get<std::string>();
               for (const auto& p : b.value("on", json::array())) {
                   if (p.is_array())
                       r.on.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
                   else
                       r.on.push_back({p.get<std::string>(), p.get<std::string>()});
               }
               r.kind = join_kind_from_string(b.value("kind", std::string("inner")));
               r.name = b.value("name", std::string{});
               send_json(res, store->write(req.matches[1], [&](Session& ss) { return to_json(ss.join(std::move(r))); }));
           }));

    s.Get(sid + "/script", guarded([store](const httplib::Request& req, httplib::Response& res) {
              res.set_content(store->read(req.matches[1], [](const Session& ss) { return ss.script(); }), "text/plain");
          }));

    s.Get(sid + "/tables/([^/]+)/export", guarded([store](const httplib::Request& req, httplib::Response& res) {
              const std::string name = req.matches[2];
              res.set_content(store->read(req.matches[1], [&](const Session& ss) { return ss.export_table(name); }),
                              "text/csv");
          }));

    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            send_json(res, {{"error", res.status == 404 ? "NotFound" : "HttpError"}, {"message", httplib::status_message(res.status)}},
                      res.status);
    });
}

}  // namespace rfw::session
