#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "des/petrinet.hpp"

using namespace des;
using namespace des::petrinet;

namespace {

// Independent reachability oracle. Recursive enumeration with its own firing
// arithmetic over a hand-rolled arc table; shares nothing with the engine
// beyond the marking convention (places P1..P7 in index order).
struct FarmingOracle {
    std::uint64_t n = 1;
    std::uint64_t k = 1;

    struct OArc {
        int place;
        std::uint64_t weight;
    };
    struct OTransition {
        std::vector<OArc> in;
        std::vector<OArc> out;
    };

    std::vector<OTransition> transitions() const {
        std::uint64_t nk = n * k;
        return {
            {{{0, 1}}, {{1, nk}, {2, nk}}},                  // T1
            {{{3, 1}}, {{4, 1}}},                            // T2
            {{{2, 1}, {4, 1}}, {{4, 1}, {5, 1}}},            // T3
            {{{1, nk}, {4, k}, {5, nk}}, {{6, 1}}},          // T4
        };
    }

    std::vector<std::uint64_t> initial() const {
        std::vector<std::uint64_t> m0(7, 0);
        m0[0] = 1;
        m0[3] = k;
        return m0;
    }

    void explore(const std::vector<std::uint64_t>& m, const std::vector<OTransition>& ts,
                 std::set<std::vector<std::uint64_t>>& seen) const {
        for (const auto& t : ts) {
            bool can = true;
            for (const auto& arc : t.in) can = can && m[arc.place] >= arc.weight;
            if (!can) continue;
            auto next = m;
            for (const auto& arc : t.in) next[arc.place] -= arc.weight;
            for (const auto& arc : t.out) next[arc.place] += arc.weight;
            if (seen.insert(next).second) explore(next, ts, seen);
        }
    }

    std::set<std::vector<std::uint64_t>> reachable() const {
        std::set<std::vector<std::uint64_t>> seen;
        seen.insert(initial());
        explore(initial(), transitions(), seen);
        return seen;
    }

    std::set<std::vector<std::uint64_t>> dead() const {
        std::set<std::vector<std::uint64_t>> out;
        auto ts = transitions();
        for (const auto& m : reachable()) {
            bool any = false;
            for (const auto& t : ts) {
                bool can = true;
                for (const auto& arc : t.in) can = can && m[arc.place] >= arc.weight;
                any = any || can;
            }
            if (!any) out.insert(m);
        }
        return out;
    }
};

Marking marking7(std::initializer_list<std::pair<int, TokenCount>> tokens) {
    Marking m(7, 0);
    for (auto [place, count] : tokens) m[place - 1] = count;
    return m;
}

FarmingNet farming(std::uint64_t n, std::uint64_t k) {
    auto fn = build_farming_net({n, k});
    REQUIRE(fn.ok());
    return std::move(fn.value());
}

}  // namespace

TEST_CASE("net builder rejects duplicate arcs and zero weights") {
    PetriNet net;
    auto p = net.add_place("P");
    auto t = net.add_transition("T");
    REQUIRE(p.ok());
    REQUIRE(t.ok());
    CHECK(net.add_input_arc(p.value(), t.value(), 1).ok());
    CHECK_FALSE(net.add_input_arc(p.value(), t.value(), 2).ok());  // duplicate pair
    CHECK_FALSE(net.add_output_arc(p.value(), t.value(), 0).ok());
    CHECK_FALSE(net.add_place("P").ok());
    CHECK_FALSE(net.add_input_arc(9, t.value(), 1).ok());
}

TEST_CASE("farming net structure") {
    auto fn = farming(2, 1);
    CHECK(fn.net.place_count() == 7);
    CHECK(fn.net.transition_count() == 4);
    CHECK(fn.initial == marking7({{1, 1}, {4, 1}}));

    // The deposit, position and matured-hours arcs carry weight n*k.
    auto t1 = fn.net.find_transition("T1").value();
    auto t4 = fn.net.find_transition("T4").value();
    auto p2 = fn.net.find_place("P2").value();
    auto p3 = fn.net.find_place("P3").value();
    auto p6 = fn.net.find_place("P6").value();
    for (const Arc& a : fn.net.outputs_of(t1)) {
        if (a.place == p2 || a.place == p3) CHECK(a.weight == 2);
    }
    bool found_p6 = false;
    for (const Arc& a : fn.net.inputs_of(t4)) {
        if (a.place == p6) {
            CHECK(a.weight == 2);
            found_p6 = true;
        }
    }
    CHECK(found_p6);

    // n=1 collapses the weighted arcs to unit weight, same structure.
    auto unit = farming(1, 1);
    CHECK(unit.net.place_count() == 7);
    for (const Arc& a : unit.net.outputs_of(t1)) CHECK(a.weight == 1);

    CHECK_FALSE(build_farming_net({0, 1}).ok());
    CHECK_FALSE(build_farming_net({1, 0}).ok());
}

TEST_CASE("enabled: initial marking offers T1 and T2, zero marking nothing") {
    auto fn = farming(2, 1);
    auto en = enabled(fn.net, fn.initial);
    REQUIRE(en.ok());
    std::vector<std::string> names;
    for (auto t : en.value()) names.push_back(fn.net.transition_name(t));
    CHECK(names == std::vector<std::string>{"T1", "T2"});

    CHECK(enabled(fn.net, Marking(7, 0)).value().empty());

    auto wrong_shape = enabled(fn.net, Marking(3, 0));
    REQUIRE_FALSE(wrong_shape.ok());
    CHECK(wrong_shape.error().code == Errc::shape_mismatch);
}

TEST_CASE("fire: job offer locks deposit and positions") {
    auto fn = farming(2, 1);
    auto t1 = fn.net.find_transition("T1").value();
    auto next = fire(fn.net, fn.initial, t1);
    REQUIRE(next.ok());
    CHECK(next.value() == marking7({{2, 2}, {3, 2}, {4, 1}}));

    auto t4 = fn.net.find_transition("T4").value();
    auto blocked = fire(fn.net, fn.initial, t4);
    REQUIRE_FALSE(blocked.ok());
    CHECK(blocked.error().code == Errc::not_enabled);
}

TEST_CASE("firing conserves the arc-balance token delta") {
    auto fn = farming(3, 2);
    auto graph = reachability(fn.net, fn.initial).value();
    for (const auto& edge : graph.edges) {
        const Marking& from = graph.nodes[edge.from];
        const Marking& to = graph.nodes[edge.to];
        std::int64_t delta = 0;
        for (std::size_t p = 0; p < from.size(); ++p) {
            delta += static_cast<std::int64_t>(to[p]) - static_cast<std::int64_t>(from[p]);
        }
        std::int64_t expected = 0;
        for (const Arc& a : fn.net.outputs_of(edge.transition)) {
            expected += static_cast<std::int64_t>(a.weight);
        }
        for (const Arc& a : fn.net.inputs_of(edge.transition)) {
            expected -= static_cast<std::int64_t>(a.weight);
        }
        CHECK(delta == expected);
    }
}

TEST_CASE("reachability of the n=2 k=1 farming net has 7 nodes and one deadlock") {
    auto fn = farming(2, 1);
    auto graph = reachability(fn.net, fn.initial).value();
    CHECK(graph.nodes.size() == 7);
    auto dead = deadlocks(fn.net, graph);
    REQUIRE(dead.size() == 1);
    // Certification consumes the working and deposit tokens; only the
    // salable-goods token remains.
    CHECK(graph.nodes[dead[0]] == marking7({{7, 1}}));
    CHECK(marking_label(fn.net, graph.nodes[dead[0]]) == "P7:1");
}

TEST_CASE("reachability graph is closed under firing") {
    auto fn = farming(2, 2);
    auto graph = reachability(fn.net, fn.initial).value();
    std::set<Marking> nodes(graph.nodes.begin(), graph.nodes.end());
    for (const auto& m : graph.nodes) {
        auto en = enabled(fn.net, m).value();
        for (auto t : en) {
            CHECK(nodes.count(fire(fn.net, m, t).value()) == 1);
        }
    }
    // Every node is reachable from the initial marking by construction of the
    // BFS; check the edge endpoints are all known nodes.
    for (const auto& e : graph.edges) {
        CHECK(e.from < graph.nodes.size());
        CHECK(e.to < graph.nodes.size());
    }
}

TEST_CASE("engine output equals the independent oracle across the parameter grid") {
    for (std::uint64_t n = 1; n <= 10; ++n) {
        for (std::uint64_t k = 1; k <= 3; ++k) {
            CAPTURE(n);
            CAPTURE(k);
            auto fn = farming(n, k);
            auto graph = reachability(fn.net, fn.initial).value();
            FarmingOracle oracle{n, k};
            auto expected = oracle.reachable();
            std::set<Marking> actual(graph.nodes.begin(), graph.nodes.end());
            CHECK(actual == expected);
            if (k == 1) CHECK(graph.nodes.size() == n + 5);

            auto dead = deadlocks(fn.net, graph);
            std::set<Marking> dead_markings;
            for (auto id : dead) dead_markings.insert(graph.nodes[id]);
            CHECK(dead_markings == oracle.dead());
            CHECK(dead_markings.size() == 1);
        }
    }
}

TEST_CASE("weighted place invariant holds on every reachable marking") {
    // k*n*M(P1) + M(P3) + M(P6) + k*n*M(P7) is constant along all firings.
    for (std::uint64_t n : {1, 2, 5}) {
        for (std::uint64_t k : {1, 2, 3}) {
            auto fn = farming(n, k);
            auto graph = reachability(fn.net, fn.initial).value();
            const std::uint64_t weight = n * k;
            const std::uint64_t at_start = weight * fn.initial[0] + fn.initial[2] +
                                           fn.initial[5] + weight * fn.initial[6];
            for (const auto& m : graph.nodes) {
                CHECK(weight * m[0] + m[2] + m[5] + weight * m[6] == at_start);
            }
        }
    }
}

TEST_CASE("boundedness ceiling trips on an unbounded net") {
    PetriNet net;
    auto p = net.add_place("P").value();
    auto t = net.add_transition("T").value();
    REQUIRE(net.add_input_arc(p, t, 1).ok());
    REQUIRE(net.add_output_arc(p, t, 2).ok());  // strictly grows
    ReachabilityOptions options;
    options.max_nodes = 50;
    auto graph = reachability(net, Marking{1}, options);
    REQUIRE_FALSE(graph.ok());
    CHECK(graph.error().code == Errc::bounded_out);
}

TEST_CASE("net with no transitions deadlocks at its initial marking") {
    PetriNet net;
    (void)net.add_place("lonely");
    auto graph = reachability(net, Marking{0}).value();
    CHECK(graph.nodes.size() == 1);
    auto dead = deadlocks(net, graph);
    REQUIRE(dead.size() == 1);
    CHECK(graph.nodes[dead[0]] == Marking{0});
}

TEST_CASE("k=2 farming run needs both hires before certification") {
    auto fn = farming(2, 2);
    auto graph = reachability(fn.net, fn.initial).value();
    auto dead = deadlocks(fn.net, graph);
    REQUIRE(dead.size() == 1);
    CHECK(graph.nodes[dead[0]] == marking7({{7, 1}}));
    // With only one hire the net stalls before T4: fire T1, T2, then T3 twice.
    auto m = fire(fn.net, fn.initial, fn.net.find_transition("T1").value()).value();
    m = fire(fn.net, m, fn.net.find_transition("T2").value()).value();
    m = fire(fn.net, m, fn.net.find_transition("T3").value()).value();
    m = fire(fn.net, m, fn.net.find_transition("T3").value()).value();
    CHECK_FALSE(is_enabled(fn.net, m, fn.net.find_transition("T4").value()));
}

namespace {

trace::Record ok_record(trace::Kind kind, const Address& job) {
    trace::Record r;
    r.kind = kind;
    r.job = job;
    r.ok = true;
    return r;
}

}  // namespace

TEST_CASE("trace conformance accepts the happy firing sequence") {
    auto fn = farming(2, 1);
    Address job = Address::from_seed("job");
    trace::Trace t;
    t.push_back(ok_record(trace::Kind::new_job_offer, job));
    t.push_back(ok_record(trace::Kind::application, job));  // no transition, skipped
    t.push_back(ok_record(trace::Kind::hiring, job));
    t.push_back(ok_record(trace::Kind::workday, job));
    t.push_back(ok_record(trace::Kind::workday, job));
    t.push_back(ok_record(trace::Kind::payment, job));  // no transition, skipped
    t.push_back(ok_record(trace::Kind::certification, job));
    auto result = conformance(t, fn.net, fn.initial);
    CHECK(result.conformant());
    CHECK(result.sequence_names(fn.net) ==
          std::vector<std::string>{"T1", "T2", "T3", "T3", "T4"});
    CHECK(result.skipped.size() == 2);
    CHECK(result.final == marking7({{7, 1}}));

    auto text = result.to_text(fn.net);
    CHECK(text.find("sequence T1 T2 T3 T3 T4") != std::string::npos);
}

TEST_CASE("trace conformance flags a missing workday at T4") {
    auto fn = farming(2, 1);
    Address job = Address::from_seed("job");
    trace::Trace t;
    t.push_back(ok_record(trace::Kind::new_job_offer, job));
    t.push_back(ok_record(trace::Kind::hiring, job));
    t.push_back(ok_record(trace::Kind::workday, job));
    t.push_back(ok_record(trace::Kind::certification, job));  // P6 underflow
    auto result = conformance(t, fn.net, fn.initial);
    REQUIRE_FALSE(result.conformant());
    CHECK(result.violation->trace_index == 3);
    CHECK(fn.net.transition_name(result.violation->transition) == "T4");
    CHECK(fn.net.place_name(result.violation->place) == "P6");
    CHECK(result.violation->required == 2);
    CHECK(result.violation->available == 1);
}

TEST_CASE("trace conformance: empty trace, rejected calls, job filter") {
    auto fn = farming(2, 1);
    CHECK(conformance({}, fn.net, fn.initial).conformant());

    Address job = Address::from_seed("job");
    Address other = Address::from_seed("other");
    trace::Trace t;
    auto rejected = ok_record(trace::Kind::certification, job);
    rejected.ok = false;
    rejected.reason = "sole_caller";
    t.push_back(rejected);                                   // rejected: skipped
    t.push_back(ok_record(trace::Kind::new_job_offer, other));  // filtered out
    auto result = conformance(t, fn.net, fn.initial, job);
    CHECK(result.conformant());
    CHECK(result.fired.empty());
    CHECK(result.skipped.size() == 1);
}

TEST_CASE("net definition file round trips") {
    auto fn = farming(2, 1);
    std::string text = to_net_text(fn.net, fn.initial);
    auto parsed = net_from_text(text);
    REQUIRE(parsed.ok());
    CHECK(parsed.value().initial == fn.initial);
    CHECK(to_net_text(parsed.value().net, parsed.value().initial) == text);
    auto graph = reachability(parsed.value().net, parsed.value().initial).value();
    CHECK(graph.nodes.size() == 7);

    CHECK_FALSE(net_from_text("desnet 2\n").ok());
    CHECK_FALSE(net_from_text("desnet 1\nin P1 T1 1\n").ok());
}

TEST_CASE("dot export labels markings and flags deadlocks") {
    auto fn = farming(1, 1);
    auto graph = reachability(fn.net, fn.initial).value();
    std::string dot = to_dot(fn.net, graph);
    CHECK(dot.find("digraph reachability") != std::string::npos);
    CHECK(dot.find("P1:1 P4:1") != std::string::npos);
    CHECK(dot.find("peripheries=2") != std::string::npos);
    CHECK(dot.find("label=\"T1\"") != std::string::npos);
}
