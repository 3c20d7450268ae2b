// Command-line entry point: serve, fixture-gen, query.

#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>

#include "collex/config.hpp"
#include "collex/fixture_store.hpp"
#include "collex/gateway.hpp"
#include "collex/network_guard.hpp"
#include "collex/offline.hpp"
#include "collex/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void stop_server(int) {
    if (g_server != nullptr) g_server->stop();
}

int run_serve(collex::ServiceConfig config) {
    collex::Service service(config);
    httplib::Server server;
    collex::bind_gateway(server, service.gateway(), config.static_dir);
    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    std::cerr << "collex: " << config.redacted().dump() << "\n";
    const auto records = service.store() ? service.store()->records().size() : 0;
    std::cerr << "collex: listening on http://" << config.host << ":" << config.port << " (" << records
              << " local records)\n";
    if (!server.listen(config.host, config.port)) {
        std::cerr << "collex: cannot listen on " << config.host << ":" << config.port << "\n";
        return 1;
    }
    return 0;
}

int run_fixture_gen(std::uint64_t seed, std::size_t count, const std::string& out) {
    const auto lines = collex::generate_fixture(seed, count);
    if (out.empty() || out == "-") {
        for (const auto& line : lines) std::cout << line.dump() << "\n";
    } else {
        collex::FixtureStore::write_lines(out, lines);
    }
    return 0;
}

int run_query(const std::string& fixture, const std::vector<std::string>& fq, const std::string& q,
              const std::string& uid, int page_size, int start, const std::vector<std::string>& facets,
              const std::vector<double>& circle, bool url_only) {
    collex::FilterQuery::Builder builder(uid);
    builder.base_query(q).page_size(page_size).start_index(start);
    for (const auto& text : fq) builder.add(collex::parse_clause(text));
    for (const auto& f : facets) builder.facet(f);
    if (!circle.empty()) builder.spatial(collex::GeoCircle::checked(circle[0], circle[1], circle[2]));
    const auto query = builder.build();
    if (url_only) {
        std::cout << collex::build_ala_url(query) << "\n";
        return 0;
    }
    collex::set_network_denied(true);
    auto store = std::make_shared<const collex::FixtureStore>(collex::FixtureStore::load(fixture));
    collex::OfflineOccurrenceClient client(store);
    std::cout << collex::encode_occurrence_response(client.search_occurrences(query)).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collection explorer service"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string host;
    int port = -1;
    std::string mode;
    std::string fixture;
    std::string script;
    std::string static_dir;
    serve->add_option("--host", host, "Listen address (COLLEX_HOST)");
    serve->add_option("--port", port, "Listen port (COLLEX_PORT)");
    serve->add_option("--mode", mode, "offline or live (COLLEX_MODE)")->check(CLI::IsMember({"offline", "live"}));
    serve->add_option("--fixture", fixture, "Fixture JSONL (COLLEX_FIXTURE)");
    serve->add_option("--chat-script", script, "Scripted chat for offline mode (COLLEX_CHAT_SCRIPT)");
    serve->add_option("--static-dir", static_dir, "Web bundle served at / (COLLEX_STATIC_DIR)");

    auto* gen = app.add_subcommand("fixture-gen", "Write a seeded synthetic fixture");
    std::uint64_t seed = 42;
    std::size_t count = 5000;
    std::string out;
    gen->add_option("--seed", seed, "RNG seed")->required();
    gen->add_option("--count", count, "Total number of records")->required()->check(CLI::PositiveNumber);
    gen->add_option("--out,-o", out, "Output file (stdout when omitted)");

    auto* query = app.add_subcommand("query", "Run a filter query against a fixture");
    std::vector<std::string> fq;
    std::string q = "*:*";
    std::string uid = "dr368";
    std::string query_fixture;
    int page_size = 10;
    int start = 0;
    std::vector<std::string> facets;
    std::vector<double> circle;
    bool url_only = false;
    query->add_option("--fq", fq, "Filter clause, e.g. 'vernacularName:*frog*' (repeatable)");
    query->add_option("--q", q, "Base query");
    query->add_option("--uid", uid, "Data resource uid");
    query->add_option("--fixture", query_fixture, "Fixture JSONL");
    query->add_option("--page-size", page_size, "Records per page")->check(CLI::PositiveNumber);
    query->add_option("--start", start, "Start index")->check(CLI::NonNegativeNumber);
    query->add_option("--facet", facets, "Facet field (repeatable)");
    query->add_option("--circle", circle, "LAT LON RADIUS_KM")->expected(3);
    query->add_flag("--url", url_only, "Print the records URL instead of querying");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) {
            auto config = collex::ServiceConfig::from_environment();
            if (!host.empty()) config.host = host;
            if (port >= 0) config.port = port;
            if (!mode.empty()) config.mode = mode == "live" ? collex::ServiceMode::Live : collex::ServiceMode::Offline;
            if (!fixture.empty()) config.fixture_path = fixture;
            if (!script.empty()) config.chat_script_path = script;
            if (!static_dir.empty()) config.static_dir = static_dir;
            return run_serve(config);
        }
        if (gen->parsed()) return run_fixture_gen(seed, count, out);
        if (!url_only && query_fixture.empty()) {
            std::cerr << "query: --fixture is required unless --url is given\n";
            return 2;
        }
        return run_query(query_fixture, fq, q, uid, page_size, start, facets, circle, url_only);
    } catch (const collex::Error& e) {
        std::cerr << "collex: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "collex: " << e.what() << "\n";
        return 1;
    }
}
