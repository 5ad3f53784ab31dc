#include "des/network.hpp"

namespace des::harness {

// splitmix64: tiny, stable across platforms, good enough for a delivery
// schedule.
std::uint64_t Network::next_random() {
    rng_state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = rng_state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

Result<Network> Network::spawn(const Scenario& scenario, const Options& options) {
    if (options.nodes < 1) {
        return make_error(Errc::invalid_argument, "network wants at least one node");
    }
    auto produced = run_scenario(scenario);
    if (!produced) return produced.error();
    const auto& blocks = produced.value().ledger->blocks();

    Network net;
    net.rng_state_ = options.seed ^ 0x6c62272e07bb0142ull;
    net.producer_head_ = blocks.back().block_hash;
    std::size_t seal_count = 0;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        for (const auto& sealed : blocks[i].txs) {
            Message m;
            m.kind = Message::Kind::submit;
            m.tx = sealed.tx;
            net.messages_.push_back(std::move(m));
        }
        Message seal;
        seal.kind = Message::Kind::seal;
        seal.sealer = seal_count++ % options.nodes;
        net.messages_.push_back(std::move(seal));
    }

    for (std::size_t n = 0; n < options.nodes; ++n) {
        Replica r;
        r.sink = std::make_unique<trace::TraceSink>();
        auto led = ledger::Ledger::from_genesis_block(blocks[0], r.sink.get());
        if (!led) return led.error();
        r.ledger = std::make_unique<ledger::Ledger>(std::move(led.value()));
        r.engine = std::make_unique<contracts::Engine>(*r.ledger, r.sink.get());
        net.replicas_.push_back(std::move(r));
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < net.messages_.size(); ++i) queue.push_back(i);
        net.queues_.push_back(std::move(queue));
        net.delayed_.push_back(false);
    }
    return net;
}

bool Network::step() {
    std::vector<std::size_t> eligible;
    for (std::size_t n = 0; n < queues_.size(); ++n) {
        if (!queues_[n].empty() && !delayed_[n]) eligible.push_back(n);
    }
    ++steps_taken_;
    if (eligible.empty()) return false;
    std::size_t node = eligible[next_random() % eligible.size()];
    std::size_t idx = queues_[node].front();
    queues_[node].pop_front();
    const Message& m = messages_[idx];
    if (m.kind == Message::Kind::submit) {
        replicas_[node].ledger->submit_transaction(m.tx);
    } else {
        replicas_[node].ledger->seal_block();
    }
    return true;
}

std::size_t Network::run_to_quiescence() {
    std::size_t delivered = 0;
    while (step()) ++delivered;
    return delivered;
}

bool Network::converged() const {
    for (std::size_t n = 1; n < replicas_.size(); ++n) {
        if (head_hash(n) != head_hash(0)) return false;
    }
    return true;
}

Digest Network::head_hash(std::size_t node) const {
    return replicas_[node].ledger->head().block_hash;
}

const trace::Trace& Network::node_trace(std::size_t node) const {
    return replicas_[node].sink->records();
}

void Network::set_delayed(std::size_t node, bool delayed) {
    if (node < delayed_.size()) delayed_[node] = delayed;
}

}  // namespace des::harness
