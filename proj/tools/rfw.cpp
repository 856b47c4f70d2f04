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

// Command-line front end: batch profile/suggest/apply/join/export and the HTTP server.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "rfw/core/csv.hpp"
#include "rfw/core/error.hpp"
#include "rfw/session/json_io.hpp"
#include "rfw/session/server.hpp"
#include "rfw/session/session.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rfw;
using namespace rfw::session;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", p.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", p.string()));
}

// "NAME=path" or a bare path named by its stem.
std::pair<std::string, std::string> load_input(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq != std::string::npos && eq > 0) return {spec.substr(0, eq), slurp(spec.substr(eq + 1))};
    return {fs::path(spec).stem().string(), slurp(spec)};
}

struct Common {
    std::vector<std::string> inputs;
    std::string keywords;
    std::string bands;
    std::string budget;
    std::size_t top = 0;
    std::string delta;
    std::string out;

    std::shared_ptr<SessionConfig> config() const {
        auto c = std::make_shared<SessionConfig>();
        if (!keywords.empty()) c->profiler.keywords.merge(profiler::KeywordConfig::parse(slurp(keywords)));
        if (!bands.empty()) c->bands.extend(dsl::BandTable::parse_csv(slurp(bands)));
        return c;
    }
};

void add_config_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--keywords", c.keywords, "Unit keyword config merged over the built-in one");
    cmd->add_option("--bands", c.bands, "Band table CSV merged over the shipped one");
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty())
        std::cout << text;
    else
        spit(c.out, text);
}

std::unique_ptr<Session> pipeline_session(const Common& c) {
    auto s = std::make_unique<Session>("batch", c.config());
    for (const auto& spec : c.inputs) {
        auto [name, csv] = load_input(spec);
        s->upload_table(name, std::move(csv));
    }
    s->run_pipeline();
    if (!c.delta.empty()) s->confirm_delta(parse_duration(c.delta), true);
    if (!c.budget.empty() || c.top) {
        json p = json::object();
        if (!c.budget.empty()) p["p"] = c.budget;
        if (c.top) p["k"] = c.top;
        s->set_policy(suggest::policy_from_json(p, s->policy()));
    }
    return s;
}

ApiServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wrangling assistant for timestamped wireless measurements"};
    app.require_subcommand(1);
    Common c;

    auto* profile = app.add_subcommand("profile", "Print semantic profiles of the input tables as JSON");
    profile->add_option("inputs", c.inputs, "NAME=path.csv or path.csv")->required();
    add_config_flags(profile, c);
    profile->add_option("--out", c.out, "Write to this file instead of stdout");

    auto* suggest = app.add_subcommand("suggest", "Run the full pipeline and print constraints and suggestions");
    suggest->add_option("inputs", c.inputs, "NAME=path.csv or path.csv")->required();
    suggest->add_option("--budget", c.budget, "Side-effect budget p: 0.1, 10% or 1/10");
    suggest->add_option("--top", c.top, "Number of suggestions k");
    suggest->add_option("--delta", c.delta, "Granularity to use instead of the detected one, e.g. 1s");
    add_config_flags(suggest, c);
    suggest->add_option("--out", c.out, "Write to this file instead of stdout");

    std::string script_path;
    std::string out_dir;
    auto* apply = app.add_subcommand("apply", "Apply a script to the inputs and write the resulting tables");
    apply->add_option("inputs", c.inputs, "NAME=path.csv or path.csv")->required();
    apply->add_option("--script", script_path, "Script file, one operation per line")->required();
    apply->add_option("--out", out_dir, "Output directory for NAME.csv files")->required();
    add_config_flags(apply, c);

    std::vector<std::string> on;
    std::string kind = "inner";
    std::string join_name;
    auto* join = app.add_subcommand("join", "Equi-join two tables and write the result as CSV");
    join->add_option("inputs", c.inputs, "LEFT and RIGHT, as NAME=path.csv or path.csv")->required()->expected(2);
    join->add_option("--on", on, "left_col:right_col (repeatable); default: the proposed join columns");
    join->add_option("--kind", kind, "inner or left")->check(CLI::IsMember({"inner", "left"}));
    join->add_option("--name", join_name, "Name of the joined table");
    join->add_option("--out", c.out, "Write to this file instead of stdout");
    add_config_flags(join, c);

    std::string data_dir = SessionStore::data_dir_from_env().string();
    std::string session_id;
    std::string table_name;
    auto* exp = app.add_subcommand("export", "Write a table of a stored session as CSV");
    exp->add_option("--session", session_id, "Session id")->required();
    exp->add_option("--table", table_name, "Base or joined table name")->required();
    exp->add_option("--data-dir", data_dir, "Session directory (default: $RFW_DATA_DIR)");
    exp->add_option("--out", c.out, "Write to this file instead of stdout");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON API");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port, 0 for any free one");
    serve->add_option("--data-dir", data_dir, "Session directory (default: $RFW_DATA_DIR)");
    add_config_flags(serve, c);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*profile) {
            const auto config = c.config();
            json out = json::array();
            for (const auto& spec : c.inputs) {
                auto [name, csv] = load_input(spec);
                const Table t = ingest_csv(csv, name, config->csv);
                out.push_back(to_json(profiler::profile_table(t, config->profiler)));
            }
            emit(c, out.dump(2) + "\n");
        } else if (*suggest) {
            auto s = pipeline_session(c);
            emit(c, s->pipeline_json().dump(2) + "\n");
        } else if (*apply) {
            std::vector<std::pair<std::string, std::string>> inputs;
            for (const auto& spec : c.inputs) inputs.push_back(load_input(spec));
            const auto tables = run_script(inputs, slurp(script_path), *c.config());
            fs::create_directories(out_dir);
            for (const auto& t : tables) spit(fs::path(out_dir) / (t.name() + ".csv"), export_csv(t));
        } else if (*join) {
            auto s = std::make_unique<Session>("batch", c.config());
            std::vector<std::string> names;
            for (const auto& spec : c.inputs) {
                auto [name, csv] = load_input(spec);
                names.push_back(name);
                s->upload_table(name, std::move(csv));
            }
            s->run_pipeline();
            JoinRequest r{names[0], names[1], {}, join_kind_from_string(kind), join_name};
            for (const auto& p : on) {
                const auto colon = p.find(':');
                if (colon == std::string::npos)
                    r.on.push_back({p, p});
                else
                    r.on.push_back({p.substr(0, colon), p.substr(colon + 1)});
            }
            const auto summary = s->join(std::move(r));
            if (summary.result.keys_not_aligned)
                std::cerr << fmt::format("warning: keys not aligned, {:.1f}% of rows matched\n",
                                         summary.result.match_fraction * 100);
            emit(c, export_csv(summary.result.table));
        } else if (*exp) {
            if (data_dir.empty()) throw Error(ErrorCode::InvalidArgument, "no data directory: pass --data-dir or set RFW_DATA_DIR");
            SessionStore store(data_dir, std::make_shared<const SessionConfig>());
            emit(c, store.read(session_id, [&](const Session& s) { return s.export_table(table_name); }));
        } else if (*serve) {
            auto store = std::make_shared<SessionStore>(data_dir, c.config());
            ApiServer server(store);
            g_server = &server;
            std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
            std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
            const int bound = server.bind(host, port);
            if (bound < 0) throw Error(ErrorCode::Io, fmt::format("cannot bind {}:{}", host, port));
            std::cerr << fmt::format("listening on http://{}:{}\n", host, bound);
            server.serve();
            g_server = nullptr;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << error_body(e).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
