#include "des/runner.hpp"

#include <sstream>

namespace des::harness {

namespace {

struct World {
    std::unique_ptr<trace::TraceSink> sink;
    std::unique_ptr<ledger::Ledger> ledger;
    std::unique_ptr<contracts::Engine> engine;
};

Result<World> make_world(const Scenario& scenario) {
    World w;
    w.sink = std::make_unique<trace::TraceSink>();
    auto led = ledger::Ledger::create(scenario.genesis, w.sink.get());
    if (!led) return led.error();
    w.ledger = std::make_unique<ledger::Ledger>(std::move(led.value()));
    w.engine = std::make_unique<contracts::Engine>(*w.ledger, w.sink.get());
    return w;
}

}  // namespace

bool RunResult::net_conformant() const {
    for (const auto& report : nets) {
        if (!report.result.conformant()) return false;
    }
    return true;
}

std::string RunResult::summary_text() const {
    std::ostringstream os;
    os << "blocks=" << (ledger->blocks().size()) << " trace_records=" << trace().size() << '\n';
    os << "chain=" << (validation.valid ? "valid" : "invalid");
    if (!validation.valid) {
        os << " height=" << validation.first_bad_height << " reason=" << validation.reason;
    }
    os << '\n';
    os << "conservation=" << (conservation_ok ? "ok" : "broken") << '\n';
    os << "fsm=" << (fsm.conformant() ? "conformant" : "violations") << '\n';
    for (const auto& report : nets) {
        os << "net job=" << report.name << " n=" << report.params.workdays
           << " k=" << report.params.workers << ' '
           << (report.result.conformant() ? "conformant" : "violation") << '\n';
    }
    for (const auto& [name, addrs] : jobs_by_name) {
        auto view = engine->query_relationship(addrs.relationship);
        if (!view) continue;
        os << "job " << name << " state="
           << lifecycle::to_string(engine->derived_state(addrs.relationship, ledger->height()))
           << " escrow=" << view.value().escrow
           << " concluded=" << view.value().concluded.size()
           << " certification="
           << (view.value().certification ? digest_hex(*view.value().certification)
                                          : std::string("-"))
           << '\n';
    }
    if (expectation_failures.empty()) {
        os << "expectations=met\n";
    } else {
        for (const auto& f : expectation_failures) os << "expectation_failed " << f << '\n';
    }
    return os.str();
}

Result<RunResult> run_scenario(const Scenario& scenario) {
    auto world = make_world(scenario);
    if (!world) return world.error();
    RunResult result;
    result.sink = std::move(world.value().sink);
    result.ledger = std::move(world.value().ledger);
    result.engine = std::move(world.value().engine);
    ledger::Ledger& led = *result.ledger;
    contracts::Engine& eng = *result.engine;

    for (const auto& entry : scenario.genesis) {
        result.actors[entry.seed] = Address::from_seed(entry.seed);
    }

    // Track submission nonces per sender; contract execution does not send.
    std::map<Address, std::uint64_t> next_nonce;
    auto nonce_for = [&](const Address& a) {
        auto it = next_nonce.find(a);
        if (it == next_nonce.end()) {
            it = next_nonce.emplace(a, led.account_nonce(a).value()).first;
        }
        it->second += 1;
        return it->second;
    };
    auto submit = [&](const Address& from, const Address& to, ledger::Amount amount,
                      std::string payload) {
        auto tx = ledger::make_transaction(from, to, amount, std::move(payload), nonce_for(from));
        auto receipt = led.submit_transaction(tx);
        if (!receipt.accepted) next_nonce[from] -= 1;  // nonce not consumed
        return receipt;
    };

    // Central-authority registrations ride the chain like any other call.
    for (const auto& seed : scenario.employers) {
        submit(eng.authority_address(), eng.registry_address(), 0,
               contracts::register_payload(lifecycle::Role::employer, Address::from_seed(seed)));
    }
    for (const auto& seed : scenario.workers) {
        submit(eng.authority_address(), eng.registry_address(), 0,
               contracts::register_payload(lifecycle::Role::worker, Address::from_seed(seed)));
    }

    auto check_conservation = [&]() {
        if (led.circulating_total() != led.genesis_total() && result.conservation_ok) {
            result.conservation_ok = false;
            result.first_conservation_break = led.height();
        }
    };

    for (const auto& step : scenario.steps) {
        StepOutcome outcome;
        outcome.line = step.line;
        auto note_receipt = [&](const ledger::TxReceipt& receipt) {
            outcome.accepted = receipt.accepted;
            if (!receipt.accepted) outcome.note = "rejected: " + receipt.reason;
        };
        switch (step.kind) {
            case Step::Kind::deploy: {
                outcome.verb = "deploy";
                contracts::JobOffer offer = step.offer;
                offer.employer = result.actors.at(step.actor);
                auto required = offer.required_deposit();
                if (!required) {
                    outcome.accepted = false;
                    outcome.note = required.error().message;
                    break;
                }
                ledger::Amount deposit = step.deposit_override.value_or(required.value());
                auto receipt = submit(offer.employer, eng.factory_address(), deposit,
                                      contracts::deploy_payload(offer));
                note_receipt(receipt);
                // The contract triple is knowable up front: addresses derive
                // from the employer and the deploy nonce.
                if (receipt.accepted) {
                    std::string tag = offer.employer.hex() + ":" +
                                      std::to_string(next_nonce[offer.employer]);
                    result.jobs_by_name[step.job] = contracts::JobAddresses{
                        Address::from_seed("sc:deposit:" + tag),
                        Address::from_seed("sc:application:" + tag),
                        Address::from_seed("sc:relationship:" + tag)};
                }
                break;
            }
            case Step::Kind::apply: {
                outcome.verb = "apply";
                const auto& addrs = result.jobs_by_name.at(step.job);
                note_receipt(submit(result.actors.at(step.actor), addrs.application, 0,
                                    contracts::apply_payload()));
                break;
            }
            case Step::Kind::hire:
            case Step::Kind::hire_code: {
                outcome.verb = step.kind == Step::Kind::hire ? "hire" : "hire_code";
                const auto& addrs = result.jobs_by_name.at(step.job);
                Address worker = result.actors.at(step.worker);
                Digest code{};
                if (step.kind == Step::Kind::hire_code) {
                    auto parsed = digest_from_hex(step.code_hex);
                    if (!parsed) {
                        outcome.accepted = false;
                        outcome.note = "bad code literal";
                        break;
                    }
                    code = parsed.value();
                } else {
                    auto view = eng.query_relationship(addrs.relationship);
                    if (view) {
                        auto it = view.value().applicants.find(worker);
                        if (it != view.value().applicants.end()) code = it->second;
                    }
                }
                note_receipt(submit(result.actors.at(step.actor), addrs.relationship, 0,
                                    contracts::hire_payload(worker, code)));
                break;
            }
            case Step::Kind::workday: {
                outcome.verb = "workday";
                const auto& addrs = result.jobs_by_name.at(step.job);
                note_receipt(submit(result.actors.at(step.actor), addrs.relationship, 0,
                                    contracts::workday_payload(result.actors.at(step.worker))));
                break;
            }
            case Step::Kind::pay: {
                outcome.verb = "pay";
                const auto& addrs = result.jobs_by_name.at(step.job);
                note_receipt(submit(
                    result.actors.at(step.actor), addrs.deposit, 0,
                    contracts::payment_payload(result.actors.at(step.worker), step.amount)));
                break;
            }
            case Step::Kind::transfer: {
                outcome.verb = "transfer";
                note_receipt(submit(result.actors.at(step.actor), result.actors.at(step.to),
                                    step.amount, ""));
                break;
            }
            case Step::Kind::seal: {
                outcome.verb = "seal";
                const auto& block = led.seal_block();
                outcome.note = "height=" + std::to_string(block.index) +
                               " txs=" + std::to_string(block.txs.size());
                check_conservation();
                break;
            }
            case Step::Kind::query: {
                outcome.verb = "query";
                const auto& addrs = result.jobs_by_name.at(step.job);
                auto view = eng.query_relationship(addrs.relationship);
                if (view) {
                    std::uint64_t hours = 0;
                    for (const auto& [_, h] : view.value().hired) hours += h;
                    outcome.note = "state=" +
                                   std::string(lifecycle::to_string(eng.derived_state(
                                       addrs.relationship, led.height()))) +
                                   " active_hours=" + std::to_string(hours) +
                                   " escrow=" + std::to_string(view.value().escrow);
                } else {
                    outcome.accepted = false;
                    outcome.note = "not deployed";
                }
                break;
            }
            case Step::Kind::tamper: {
                outcome.verb = "tamper";
                Status s = led.tamper_block(step.height, step.offset, step.xor_mask);
                outcome.accepted = s.ok();
                if (!s.ok()) {
                    outcome.note = s.error().message;
                } else {
                    result.tampered = true;
                    outcome.note = "height=" + std::to_string(step.height) +
                                   " offset=" + std::to_string(step.offset);
                }
                break;
            }
        }
        result.outcomes.push_back(std::move(outcome));
    }

    if (led.pending_count() > 0) {
        led.seal_block();
        check_conservation();
        StepOutcome tail;
        tail.verb = "seal";
        tail.note = "implicit final seal";
        result.outcomes.push_back(std::move(tail));
    }

    result.validation = led.validate_chain();
    result.fsm = lifecycle::monitor(result.trace());
    for (const auto& [name, addrs] : result.jobs_by_name) {
        auto view = eng.query_relationship(addrs.relationship);
        if (!view) continue;  // deploy rejected, contracts never created
        JobNetReport report;
        report.name = name;
        report.relationship = addrs.relationship;
        report.params.workdays = view.value().offer.workdays;
        report.params.workers = view.value().offer.positions;
        auto net = petrinet::build_farming_net(report.params);
        if (!net) continue;
        report.result = petrinet::conformance(result.trace(), net.value().net,
                                              net.value().initial, addrs.relationship);
        result.nets.push_back(std::move(report));
    }

    // Expectations default to: valid chain, conformant trace.
    bool expect_fsm = true, expect_net = true, expect_chain = true;
    for (const auto& e : scenario.expects) {
        switch (e.subject) {
            case Expectation::Subject::fsm: expect_fsm = e.positive; break;
            case Expectation::Subject::net: expect_net = e.positive; break;
            case Expectation::Subject::chain: expect_chain = e.positive; break;
        }
    }
    if (result.fsm.conformant() != expect_fsm) {
        result.expectation_failures.push_back(expect_fsm ? "fsm: expected conformant"
                                                         : "fsm: expected violation");
    }
    if (result.net_conformant() != expect_net) {
        result.expectation_failures.push_back(expect_net ? "net: expected conformant"
                                                         : "net: expected violation");
    }
    if (result.validation.valid != expect_chain) {
        result.expectation_failures.push_back(expect_chain ? "chain: expected valid"
                                                           : "chain: expected invalid");
    }
    if (!result.conservation_ok) {
        result.expectation_failures.push_back("conservation broken at height " +
                                              std::to_string(result.first_conservation_break));
    }
    return result;
}

Result<ReplayResult> replay_chain(std::span<const ledger::Block> blocks) {
    if (blocks.empty()) return make_error(Errc::invalid_argument, "empty chain");
    ReplayResult out;
    out.sink = std::make_unique<trace::TraceSink>();
    auto led = ledger::Ledger::from_genesis_block(blocks[0], out.sink.get());
    if (!led) return led.error();
    out.ledger = std::make_unique<ledger::Ledger>(std::move(led.value()));
    out.engine = std::make_unique<contracts::Engine>(*out.ledger, out.sink.get());
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        for (const auto& sealed : blocks[i].txs) {
            auto receipt = out.ledger->submit_transaction(sealed.tx);
            if (!receipt.accepted) {
                return make_error(Errc::parse_error,
                                  "block " + std::to_string(i) + ": replay rejected tx (" +
                                      receipt.reason + ")");
            }
        }
        const auto& resealed = out.ledger->seal_block();
        if (resealed.block_hash != blocks[i].block_hash) {
            return make_error(Errc::parse_error,
                              "block " + std::to_string(i) + ": replay hash mismatch");
        }
    }
    return out;
}

}  // namespace des::harness
