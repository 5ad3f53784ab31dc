// Acceptance suite: one check per shipped guarantee, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "des/contracts.hpp"
#include "des/ledger.hpp"
#include "des/lifecycle.hpp"
#include "des/network.hpp"
#include "des/petrinet.hpp"
#include "des/runner.hpp"
#include "des/scenario.hpp"

using namespace des;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    int number;
    std::string title;
    std::function<void(std::ostringstream&)> body;  // throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

harness::Scenario load_scenario(const std::string& name) {
    auto text = harness::read_file(std::string(DES_SCENARIO_DIR) + "/" + name);
    if (!text) throw Failure("cannot read scenario " + name);
    auto scenario = harness::Scenario::parse(text.value());
    if (!scenario) throw Failure("cannot parse scenario " + name + ": " + scenario.error().message);
    return std::move(scenario.value());
}

harness::RunResult run_scenario_file(const std::string& name) {
    auto result = harness::run_scenario(load_scenario(name));
    if (!result) throw Failure("scenario " + name + " failed: " + result.error().message);
    return std::move(result.value());
}

petrinet::Marking marking7(std::initializer_list<std::pair<int, std::uint64_t>> tokens) {
    petrinet::Marking m(7, 0);
    for (auto [place, count] : tokens) m[place - 1] = count;
    return m;
}

// Brute-force farming-net enumerator, independent of the engine (own arc
// table, own firing arithmetic, recursive exploration).
struct Oracle {
    std::uint64_t n, k;
    struct T {
        std::vector<std::pair<int, std::uint64_t>> in, out;
    };
    std::vector<T> ts() const {
        std::uint64_t nk = n * k;
        return {{{{0, 1}}, {{1, nk}, {2, nk}}},
                {{{3, 1}}, {{4, 1}}},
                {{{2, 1}, {4, 1}}, {{4, 1}, {5, 1}}},
                {{{1, nk}, {4, k}, {5, nk}}, {{6, 1}}}};
    }
    void walk(const std::vector<std::uint64_t>& m, const std::vector<T>& trans,
              std::set<std::vector<std::uint64_t>>& seen) const {
        for (const auto& t : trans) {
            bool can = true;
            for (auto [p, w] : t.in) can = can && m[p] >= w;
            if (!can) continue;
            auto next = m;
            for (auto [p, w] : t.in) next[p] -= w;
            for (auto [p, w] : t.out) next[p] += w;
            if (seen.insert(next).second) walk(next, trans, seen);
        }
    }
    std::set<std::vector<std::uint64_t>> reachable() const {
        std::vector<std::uint64_t> m0(7, 0);
        m0[0] = 1;
        m0[3] = k;
        std::set<std::vector<std::uint64_t>> seen{m0};
        walk(m0, ts(), seen);
        return seen;
    }
};

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// --- criterion bodies -------------------------------------------------------

void criterion_reachability(std::ostringstream& log) {
    auto start = Clock::now();
    auto fn = petrinet::build_farming_net({2, 1}).value();
    auto graph = petrinet::reachability(fn.net, fn.initial).value();
    auto dead = petrinet::deadlocks(fn.net, graph);
    double elapsed = seconds_since(start);
    log << "nodes=" << graph.nodes.size() << " deadlocks=" << dead.size();
    if (!dead.empty()) log << " deadlock={" << marking_label(fn.net, graph.nodes[dead[0]]) << "}";
    log << " time=" << elapsed << "s";
    require(graph.nodes.size() == 7, "expected exactly 7 nodes");
    require(dead.size() == 1, "expected a unique deadlock");
    require(elapsed < 1.0, "exceeded the 1 s budget");
    require(graph.nodes[dead[0]] == marking7({{4, 1}, {7, 1}}),
            "deadlock marking is {" + marking_label(fn.net, graph.nodes[dead[0]]) +
                "}, expected {P4:1 P7:1}");
}

void criterion_oracle(std::ostringstream& log) {
    auto start = Clock::now();
    for (std::uint64_t n = 1; n <= 10; ++n) {
        for (std::uint64_t k = 1; k <= 3; ++k) {
            auto fn = petrinet::build_farming_net({n, k}).value();
            auto graph = petrinet::reachability(fn.net, fn.initial).value();
            std::set<petrinet::Marking> engine_nodes(graph.nodes.begin(), graph.nodes.end());
            auto oracle_nodes = Oracle{n, k}.reachable();
            require(engine_nodes == oracle_nodes,
                    "engine/oracle node sets differ at n=" + std::to_string(n) +
                        " k=" + std::to_string(k));
            if (k == 1) {
                require(graph.nodes.size() == n + 5,
                        "k=1 node count " + std::to_string(graph.nodes.size()) + " != n+5 at n=" +
                            std::to_string(n));
            }
        }
    }
    double elapsed = seconds_since(start);
    log << "grid n=1..10 k=1..3 matched, k=1 counts = n+5, time=" << elapsed << "s";
    require(elapsed < 30.0, "exceeded the 30 s budget");
}

void criterion_happy_path(std::ostringstream& log) {
    auto result = run_scenario_file("happy_n2.scn");
    Address worker = Address::from_seed("w1");
    auto balance = result.ledger->balance(worker).value();
    require(balance == 160, "worker balance is " + std::to_string(balance) + ", expected 160");

    const auto& job = result.jobs_by_name.at("job1");
    auto view = result.engine->query_relationship(job.relationship).value();
    require(view.escrow == 0, "escrow not empty at conclusion");

    int certs = 0;
    for (const auto& rec : result.trace()) {
        if (rec.kind == trace::Kind::certification && rec.ok) ++certs;
    }
    require(certs == 1, "expected exactly one certification record, saw " + std::to_string(certs));

    auto phase = result.engine->derived_state(job.relationship, result.ledger->height());
    require(phase == lifecycle::Phase::conclusion, "derived state is not conclusion");
    require(result.fsm.conformant(), "phase monitor reported violations");

    require(result.nets.size() == 1, "expected one net report");
    auto fn = petrinet::build_farming_net(result.nets[0].params).value();
    auto names = result.nets[0].result.sequence_names(fn.net);
    std::string seq;
    for (const auto& name : names) seq += seq.empty() ? name : " " + name;
    log << "worker +160, escrow 0, one certification, conclusion, sequence [" << seq << "]";
    require(names == std::vector<std::string>{"T1", "T2", "T3", "T3", "T4"},
            "firing sequence is [" + seq + "]");
}

void criterion_sole_caller(std::ostringstream& log) {
    std::uint64_t rng = 20250809;
    int sequences = 1000;
    std::uint64_t external_payment_successes = 0;
    std::uint64_t internal_payments = 0;
    for (int seq = 0; seq < sequences; ++seq) {
        trace::TraceSink sink;
        auto led = ledger::Ledger::create(
                       {{"boss", 1000000}, {"w0", 0}, {"w1", 0}, {"w2", 0}, {"mal", 777}}, &sink)
                       .value();
        contracts::Engine engine(led, &sink);
        Address boss = Address::from_seed("boss");
        Address mal = Address::from_seed("mal");
        std::vector<Address> workers = {Address::from_seed("w0"), Address::from_seed("w1"),
                                        Address::from_seed("w2")};
        std::map<Address, std::uint64_t> nonces;
        auto submit = [&](const Address& from, const Address& to, ledger::Amount amount,
                          std::string payload) {
            auto it = nonces.find(from);
            if (it == nonces.end()) it = nonces.emplace(from, 0).first;
            auto tx = ledger::make_transaction(from, to, amount, std::move(payload),
                                               it->second + 1);
            auto receipt = led.submit_transaction(tx);
            if (receipt.accepted) it->second += 1;
            return receipt;
        };

        submit(engine.authority_address(), engine.registry_address(), 0,
               contracts::register_payload(lifecycle::Role::employer, boss));
        for (const auto& w : workers) {
            submit(engine.authority_address(), engine.registry_address(), 0,
                   contracts::register_payload(lifecycle::Role::worker, w));
        }
        led.seal_block();

        contracts::JobOffer offer;
        offer.employer = boss;
        offer.positions = 1 + splitmix(rng) % 3;
        offer.workdays = 1 + splitmix(rng) % 2;
        offer.hours_per_day = 1 + splitmix(rng) % 3;
        offer.time_wage = 1 + splitmix(rng) % 5;
        offer.certify = splitmix(rng) % 2 == 0;
        submit(boss, engine.factory_address(), offer.required_deposit().value(),
               contracts::deploy_payload(offer));
        led.seal_block();
        Address rel = engine.jobs().back();
        auto addrs = engine.job_addresses(rel).value();

        // Adversarial noise: direct payments from every non-contract actor,
        // wrong codes, premature workdays, double hires.
        std::size_t hired = 0;
        for (int op = 0; op < 18; ++op) {
            const Address& w = workers[splitmix(rng) % workers.size()];
            switch (splitmix(rng) % 6) {
                case 0:
                    submit(w, addrs.application, 0, contracts::apply_payload());
                    break;
                case 1: {
                    auto view = engine.query_relationship(rel).value();
                    auto it = view.applicants.find(w);
                    Digest code =
                        it != view.applicants.end()
                            ? it->second
                            : contracts::identification_code(addrs.application, w, 99);
                    if (splitmix(rng) % 4 == 0) code[0] ^= 0x5a;  // forged
                    submit(boss, addrs.relationship, 0, contracts::hire_payload(w, code));
                    break;
                }
                case 2:
                    submit(boss, addrs.relationship, 0, contracts::workday_payload(w));
                    break;
                case 3: {
                    const Address& caller = splitmix(rng) % 2 ? mal : boss;
                    submit(caller, addrs.deposit, 0,
                           contracts::payment_payload(w, offer.wage_total()));
                    break;
                }
                case 4:
                    submit(mal, addrs.deposit, 0,
                           contracts::payment_payload(mal, splitmix(rng) % 400));
                    break;
                case 5:
                    led.seal_block();
                    break;
            }
        }
        led.seal_block();

        // Drive every position to conclusion despite the noise.
        {
            auto view = engine.query_relationship(rel).value();
            hired = view.hired.size() + view.concluded.size();
            std::size_t next_worker = 0;
            while (hired < offer.positions) {
                const Address& w = workers[next_worker++ % workers.size()];
                auto v = engine.query_relationship(rel).value();
                if (v.hired.count(w) || v.concluded.count(w)) continue;
                submit(w, addrs.application, 0, contracts::apply_payload());
                led.seal_block();
                auto code = engine.query_relationship(rel).value().applicants.at(w);
                submit(boss, addrs.relationship, 0, contracts::hire_payload(w, code));
                led.seal_block();
                ++hired;
            }
            for (const auto& w : workers) {
                for (std::uint64_t d = 0; d < offer.workdays + 2; ++d) {
                    submit(boss, addrs.relationship, 0, contracts::workday_payload(w));
                }
            }
            led.seal_block();
        }

        auto view = engine.query_relationship(rel).value();
        require(view.closed, "randomized run failed to conclude the job");
        require(view.escrow == 0, "escrow left behind");
        require(led.circulating_total() == led.genesis_total(), "conservation broken");

        // Audit the chain: a successful payment may only be caused by a
        // workday call addressed to the relationship contract.
        std::map<Digest, const ledger::Transaction*> by_id;
        for (const auto& block : led.blocks()) {
            for (const auto& sealed : block.txs) by_id.emplace(sealed.tx.tx_id, &sealed.tx);
        }
        std::map<Address, ledger::Amount> credited;
        for (const auto& rec : sink.records()) {
            if (rec.kind != trace::Kind::payment) continue;
            if (!rec.ok) continue;
            ++internal_payments;
            const ledger::Transaction* cause = by_id.at(*rec.tx_id);
            bool internal = cause->recipient == addrs.relationship &&
                            cause->payload.rfind("workday ", 0) == 0;
            if (!internal) ++external_payment_successes;
            credited[rec.actor] += std::stoull(rec.detail("amount").value());
        }
        for (const auto& w : workers) {
            bool concluded = view.concluded.count(w) != 0;
            ledger::Amount expect = concluded ? offer.wage_total() : 0;
            require(credited[w] == expect, "worker credit mismatch");
            require(led.balance(w).value() == expect, "worker balance mismatch");
        }
    }
    log << sequences << " sequences, " << internal_payments
        << " contract payments, external successes=" << external_payment_successes;
    require(external_payment_successes == 0, "an external payment call succeeded");
}

void criterion_conservation(std::ostringstream& log) {
    const char* corpus[] = {"happy_n2.scn",      "happy_k2.scn",       "generic_no_cert.scn",
                            "fraud_direct_payment.scn", "fraud_wrong_code.scn",
                            "unauthorized_actors.scn",  "multi_job.scn",
                            "conservation_stress.scn",  "tamper_chain.scn"};
    int checked = 0;
    for (const char* name : corpus) {
        auto result = run_scenario_file(name);
        require(result.conservation_ok,
                std::string(name) + " broke conservation at height " +
                    std::to_string(result.first_conservation_break));
        // Split view: user balances plus contract escrows equal the genesis
        // supply at the head.
        ledger::Amount escrow = 0;
        for (const auto& [jname, addrs] : result.jobs_by_name) {
            auto view = result.engine->query_relationship(addrs.relationship);
            if (view) escrow += view.value().escrow;
        }
        ledger::Amount total = result.ledger->circulating_total();
        require(total == result.ledger->genesis_total(), std::string(name) + " supply drifted");
        require(escrow <= total, "escrow exceeds supply");
        ++checked;
    }
    log << checked << " scenarios, supply constant at every sealed height";
}

void criterion_integrity(std::ostringstream& log) {
    trace::TraceSink sink;
    auto led = ledger::Ledger::create({{"boss", 100000}, {"w1", 0}, {"w2", 0}}, &sink).value();
    contracts::Engine engine(led, &sink);
    Address boss = Address::from_seed("boss");
    Address w1 = Address::from_seed("w1");
    std::map<Address, std::uint64_t> nonces;
    auto submit = [&](const Address& from, const Address& to, ledger::Amount amount,
                      std::string payload) {
        auto it = nonces.emplace(from, 0).first;
        auto tx = ledger::make_transaction(from, to, amount, std::move(payload), it->second + 1);
        auto receipt = led.submit_transaction(tx);
        if (receipt.accepted) it->second += 1;
    };
    submit(engine.authority_address(), engine.registry_address(), 0,
           contracts::register_payload(lifecycle::Role::employer, boss));
    submit(engine.authority_address(), engine.registry_address(), 0,
           contracts::register_payload(lifecycle::Role::worker, w1));
    led.seal_block();
    contracts::JobOffer offer;
    offer.employer = boss;
    offer.positions = 1;
    offer.workdays = 2;
    offer.hours_per_day = 8;
    offer.time_wage = 10;
    offer.description = "integrity fixture";
    submit(boss, engine.factory_address(), 160, contracts::deploy_payload(offer));
    led.seal_block();
    Address rel = engine.jobs().back();
    auto addrs = engine.job_addresses(rel).value();
    submit(w1, addrs.application, 0, contracts::apply_payload());
    led.seal_block();
    auto code = engine.query_relationship(rel).value().applicants.at(w1);
    submit(boss, addrs.relationship, 0, contracts::hire_payload(w1, code));
    led.seal_block();
    submit(boss, addrs.relationship, 0, contracts::workday_payload(w1));
    led.seal_block();
    submit(boss, addrs.relationship, 0, contracts::workday_payload(w1));
    led.seal_block();
    while (led.blocks().size() < 20) {
        submit(boss, w1, 1 + led.blocks().size(), "");
        led.seal_block();
    }
    require(led.blocks().size() == 20, "fixture should have 20 blocks");
    require(led.validate_chain().valid, "fixture chain must start valid");

    std::size_t positions_tested = 0;
    for (std::uint64_t h = 0; h < 20; ++h) {
        std::size_t count = led.block_value_byte_count(h);
        for (std::size_t off = 0; off < count; ++off) {
            if (!led.tamper_block(h, off, 0xa5).ok()) {
                throw Failure("tamper refused at height " + std::to_string(h));
            }
            auto report = led.validate_chain();
            bool caught = !report.valid && report.first_bad_height == h;
            (void)led.tamper_block(h, off, 0xa5);  // XOR back
            if (!caught) {
                throw Failure("mutation at height " + std::to_string(h) + " offset " +
                              std::to_string(off) + " was not reported at that height");
            }
            ++positions_tested;
        }
    }
    require(led.validate_chain().valid, "chain must be valid after undoing every mutation");
    log << "20 blocks, " << positions_tested << " byte positions, every mutation caught";
}

void criterion_determinism(std::ostringstream& log) {
    auto a = run_scenario_file("happy_n2.scn");
    auto b = run_scenario_file("happy_n2.scn");
    require(a.ledger->head().block_hash == b.ledger->head().block_hash,
            "head hashes differ between identical runs");
    require(trace::to_text(a.trace()) == trace::to_text(b.trace()),
            "trace files differ between identical runs");
    require(ledger::chain_to_text(a.ledger->blocks()) ==
                ledger::chain_to_text(b.ledger->blocks()),
            "chain files differ between identical runs");

    auto scenario = load_scenario("happy_n2.scn");
    int converged = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto net = harness::Network::spawn(scenario, {3, seed});
        if (!net) throw Failure("network spawn failed");
        net.value().run_to_quiescence();
        require(net.value().converged(), "seed " + std::to_string(seed) + " did not converge");
        require(net.value().head_hash(0) == a.ledger->head().block_hash,
                "replica head differs from the canonical head");
        ++converged;
    }
    log << "byte-identical reruns; " << converged << "/10 seeds converged to one head";
}

void criterion_fsm_totality(std::ostringstream& log) {
    using lifecycle::Event;
    using lifecycle::Phase;
    int accepted = 0;
    for (Phase p : lifecycle::kAllPhases) {
        for (Event e : lifecycle::kAllEvents) {
            if (lifecycle::transition(p, e)) ++accepted;
        }
    }
    require(accepted == 5, "accepted pair count is " + std::to_string(accepted));
    auto edge = [&](Phase p, Event e, Phase want) {
        auto got = lifecycle::transition(p, e);
        require(got.has_value() && *got == want, "missing edge");
    };
    edge(Phase::idle, Event::new_job_offer, Phase::awaiting_appliers);
    edge(Phase::awaiting_appliers, Event::application, Phase::awaiting_appliers);
    edge(Phase::awaiting_appliers, Event::hiring, Phase::relationship);
    edge(Phase::relationship, Event::workday, Phase::relationship);
    edge(Phase::relationship, Event::payment, Phase::conclusion);
    require(!lifecycle::transition(Phase::conclusion, Event::payment).has_value(),
            "conclusion must be terminal");
    log << "20 pairs tested, exactly the 5 diagram edges accepted";
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "farming net n=2 k=1: 7 nodes, unique deadlock {P4:1,P7:1}", criterion_reachability},
        {2, "reachability engine matches brute-force oracle; k=1 count = n+5", criterion_oracle},
        {3, "happy path: wage 160, escrow 0, one certification, T1 T2 T3 T3 T4",
         criterion_happy_path},
        {4, "sole-caller: 1000 adversarial sequences, exact single payout", criterion_sole_caller},
        {5, "conservation over the scenario corpus", criterion_conservation},
        {6, "integrity: every single-byte mutation caught at its height", criterion_integrity},
        {7, "determinism and 3-node convergence over 10 seeds", criterion_determinism},
        {8, "phase transition totality over 4 states x 5 events", criterion_fsm_totality},
    };
    int failures = 0;
    for (const auto& criterion : criteria) {
        std::ostringstream log;
        try {
            criterion.body(log);
            std::cout << "PASS criterion " << criterion.number << ": " << criterion.title;
            if (!log.str().empty()) std::cout << " [" << log.str() << "]";
            std::cout << '\n';
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL criterion " << criterion.number << ": " << criterion.title << " ("
                      << e.what() << ")";
            if (!log.str().empty()) std::cout << " [" << log.str() << "]";
            std::cout << '\n';
        }
    }
    std::cout << (failures == 0 ? "acceptance: all criteria passed"
                                : "acceptance: " + std::to_string(failures) + " criteria failed")
              << '\n';
    return failures;
}
