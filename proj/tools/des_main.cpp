// Command line front end: scenario runner, chain verifier, reachability
// explorer, trace conformance checker and replicated-network simulation.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "des/network.hpp"
#include "des/petrinet.hpp"
#include "des/runner.hpp"
#include "des/scenario.hpp"

namespace fs = std::filesystem;
using namespace des;

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out_dir) {
    auto text = harness::read_file(scenario_path);
    if (!text) {
        std::cerr << "error: " << text.error().message << '\n';
        return 2;
    }
    auto scenario = harness::Scenario::parse(text.value());
    if (!scenario) {
        std::cerr << "error: " << scenario_path << ": " << scenario.error().message << '\n';
        return 2;
    }
    auto run = harness::run_scenario(scenario.value());
    if (!run) {
        std::cerr << "error: " << run.error().message << '\n';
        return 2;
    }
    const auto& result = run.value();
    for (const auto& outcome : result.outcomes) {
        std::cout << "step line=" << outcome.line << ' ' << outcome.verb << ' '
                  << (outcome.accepted ? "accepted" : "rejected");
        if (!outcome.note.empty()) std::cout << ' ' << outcome.note;
        std::cout << '\n';
    }
    std::cout << result.summary_text();

    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) {
            std::cerr << "error: cannot create " << out_dir << '\n';
            return 2;
        }
        auto chain_text = ledger::chain_to_text(result.ledger->blocks());
        harness::write_file((fs::path(out_dir) / "chain.txt").string(), chain_text);
        harness::write_file((fs::path(out_dir) / "trace.txt").string(),
                            trace::to_text(result.trace()));
        harness::write_file((fs::path(out_dir) / "fsm_report.txt").string(),
                            result.fsm.to_text());
        for (const auto& report : result.nets) {
            auto net = petrinet::build_farming_net(report.params);
            if (!net) continue;
            harness::write_file(
                (fs::path(out_dir) / ("net_report_" + report.name + ".txt")).string(),
                report.result.to_text(net.value().net));
        }
        std::cout << "out=" << out_dir << '\n';
    }
    return result.expectation_failures.empty() ? 0 : 1;
}

int cmd_verify(const std::string& chain_path) {
    auto text = harness::read_file(chain_path);
    if (!text) {
        std::cerr << "error: " << text.error().message << '\n';
        return 2;
    }
    auto blocks = ledger::chain_from_text(text.value());
    if (!blocks) {
        std::cerr << "chain=invalid reason=" << trace::pct_encode(blocks.error().message) << '\n';
        return 1;
    }
    auto report = ledger::validate_blocks(blocks.value());
    if (report.valid) {
        std::cout << "chain=valid blocks=" << blocks.value().size() << '\n';
        return 0;
    }
    std::cout << "chain=invalid height=" << report.first_bad_height
              << " reason=" << trace::pct_encode(report.reason) << '\n';
    return 1;
}

int cmd_reachability(std::uint64_t n, std::uint64_t k, const std::string& dot_path,
                     const std::string& net_out, std::size_t max_nodes) {
    auto farming = petrinet::build_farming_net({n, k});
    if (!farming) {
        std::cerr << "error: " << farming.error().message << '\n';
        return 2;
    }
    petrinet::ReachabilityOptions options;
    options.max_nodes = max_nodes;
    auto graph = petrinet::reachability(farming.value().net, farming.value().initial, options);
    if (!graph) {
        std::cerr << "error: " << graph.error().message << '\n';
        return 1;
    }
    auto dead = petrinet::deadlocks(farming.value().net, graph.value());
    std::cout << "n=" << n << " k=" << k << " places=" << farming.value().net.place_count()
              << " transitions=" << farming.value().net.transition_count()
              << " nodes=" << graph.value().nodes.size() << " edges=" << graph.value().edges.size()
              << " deadlocks=" << dead.size() << '\n';
    for (std::size_t id : dead) {
        std::cout << "deadlock "
                  << petrinet::marking_label(farming.value().net, graph.value().nodes[id]) << '\n';
    }
    if (!dot_path.empty()) {
        auto s = harness::write_file(dot_path,
                                     petrinet::to_dot(farming.value().net, graph.value()));
        if (!s) {
            std::cerr << "error: " << s.error().message << '\n';
            return 2;
        }
        std::cout << "dot=" << dot_path << '\n';
    }
    if (!net_out.empty()) {
        auto s = harness::write_file(
            net_out, petrinet::to_net_text(farming.value().net, farming.value().initial));
        if (!s) {
            std::cerr << "error: " << s.error().message << '\n';
            return 2;
        }
        std::cout << "net=" << net_out << '\n';
    }
    return 0;
}

int cmd_conformance(const std::string& trace_path, std::uint64_t n, std::uint64_t k,
                    const std::string& job_hex) {
    auto text = harness::read_file(trace_path);
    if (!text) {
        std::cerr << "error: " << text.error().message << '\n';
        return 2;
    }
    auto records = trace::trace_from_text(text.value());
    if (!records) {
        std::cerr << "error: " << records.error().message << '\n';
        return 2;
    }
    auto farming = petrinet::build_farming_net({n, k});
    if (!farming) {
        std::cerr << "error: " << farming.error().message << '\n';
        return 2;
    }
    std::optional<Address> job;
    if (!job_hex.empty()) {
        job = Address::parse_hex(job_hex);
        if (!job) {
            std::cerr << "error: bad --job address\n";
            return 2;
        }
    }
    auto result = petrinet::conformance(records.value(), farming.value().net,
                                        farming.value().initial, job);
    std::cout << result.to_text(farming.value().net);
    return result.conformant() ? 0 : 1;
}

int cmd_net_sim(const std::string& scenario_path, std::size_t nodes, std::uint64_t seed) {
    auto text = harness::read_file(scenario_path);
    if (!text) {
        std::cerr << "error: " << text.error().message << '\n';
        return 2;
    }
    auto scenario = harness::Scenario::parse(text.value());
    if (!scenario) {
        std::cerr << "error: " << scenario.error().message << '\n';
        return 2;
    }
    harness::Network::Options options;
    options.nodes = nodes;
    options.seed = seed;
    auto net = harness::Network::spawn(scenario.value(), options);
    if (!net) {
        std::cerr << "error: " << net.error().message << '\n';
        return 2;
    }
    std::size_t delivered = net.value().run_to_quiescence();
    std::cout << "nodes=" << nodes << " seed=" << seed << " delivered=" << delivered << '\n';
    for (std::size_t i = 0; i < net.value().node_count(); ++i) {
        std::cout << "node " << i << " head=" << digest_hex(net.value().head_hash(i)) << '\n';
    }
    bool ok = net.value().converged();
    std::cout << "converged=" << (ok ? "true" : "false") << '\n';
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic employment-escrow ledger simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    auto* run = app.add_subcommand("run", "Execute a scenario and report conformance");
    run->add_option("scenario", scenario_path, "Scenario file (.scn)")->required();
    run->add_option("--out", out_dir, "Directory for chain/trace/report files");

    std::string chain_path;
    auto* verify = app.add_subcommand("verify", "Validate an exported chain file");
    verify->add_option("chain", chain_path, "Chain file")->required();

    std::uint64_t n = 2, k = 1;
    std::string dot_path, net_out, trace_path, job_hex;
    std::size_t max_nodes = 1'000'000;
    auto* reach = app.add_subcommand("reachability", "Explore the farming net state space");
    reach->add_option("--n", n, "Workdays per position")->required();
    reach->add_option("--k", k, "Positions / applicants")->required();
    reach->add_option("--dot", dot_path, "Write the reachability graph as DOT");
    reach->add_option("--net-out", net_out, "Write the net definition file");
    reach->add_option("--max-nodes", max_nodes, "Boundedness ceiling");

    auto* conf = app.add_subcommand("conformance", "Map a trace onto the farming net");
    conf->add_option("trace", trace_path, "Trace file")->required();
    conf->add_option("--n", n, "Workdays per position")->required();
    conf->add_option("--k", k, "Positions / applicants")->required();
    conf->add_option("--job", job_hex, "Restrict to one relationship address");

    std::size_t nodes = 3;
    std::uint64_t seed = 0;
    std::string sim_scenario;
    auto* sim = app.add_subcommand("net-sim", "Replicated-ledger convergence simulation");
    sim->add_option("--nodes", nodes, "Replica count")->required();
    sim->add_option("--seed", seed, "Delivery schedule seed")->required();
    sim->add_option("--scenario", sim_scenario, "Scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(scenario_path, out_dir);
    if (verify->parsed()) return cmd_verify(chain_path);
    if (reach->parsed()) return cmd_reachability(n, k, dot_path, net_out, max_nodes);
    if (conf->parsed()) return cmd_conformance(trace_path, n, k, job_hex);
    if (sim->parsed()) return cmd_net_sim(sim_scenario, nodes, seed);
    return 2;
}
