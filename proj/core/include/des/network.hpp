#ifndef DES_NETWORK_HPP
#define DES_NETWORK_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "des/contracts.hpp"
#include "des/ledger.hpp"
#include "des/runner.hpp"
#include "des/scenario.hpp"

namespace des::harness {

// Deterministic replicated-ledger simulation. The scenario is executed once
// to obtain the canonical message stream (transaction submissions and seal
// directives, sealers assigned round-robin); every replica receives the same
// stream in the same order, while the interleaving across replicas is drawn
// from a seeded generator. Replicas converge to the producer's head hash once
// their queues drain.
class Network {
public:
    struct Options {
        std::size_t nodes = 3;
        std::uint64_t seed = 0;
    };

    static Result<Network> spawn(const Scenario& scenario, const Options& options);

    std::size_t node_count() const { return replicas_.size(); }
    // Delivers one queued message to a schedule-chosen node. False once all
    // queues are empty (quiescence).
    bool step();
    std::size_t run_to_quiescence();

    bool converged() const;  // all replica head hashes equal
    Digest head_hash(std::size_t node) const;
    Digest producer_head() const { return producer_head_; }
    std::size_t pending(std::size_t node) const { return queues_[node].size(); }
    const trace::Trace& node_trace(std::size_t node) const;

    // Test hook: a delayed node receives nothing until released.
    void set_delayed(std::size_t node, bool delayed);

private:
    struct Message {
        enum class Kind { submit, seal };
        Kind kind = Kind::submit;
        ledger::Transaction tx;
        std::size_t sealer = 0;  // round-robin attribution for seal directives
    };
    struct Replica {
        std::unique_ptr<trace::TraceSink> sink;
        std::unique_ptr<ledger::Ledger> ledger;
        std::unique_ptr<contracts::Engine> engine;
    };

    std::uint64_t next_random();

    std::vector<Message> messages_;
    std::vector<Replica> replicas_;
    std::vector<std::deque<std::size_t>> queues_;  // indices into messages_
    std::vector<bool> delayed_;
    Digest producer_head_{};
    std::uint64_t rng_state_ = 0;
    std::uint64_t steps_taken_ = 0;
};

}  // namespace des::harness

#endif
