#ifndef DES_PETRINET_HPP
#define DES_PETRINET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "des/result.hpp"
#include "des/trace.hpp"

namespace des::petrinet {

using TokenCount = std::uint64_t;

// Token vector, index-aligned with the net's place list. The vector itself is
// the canonical set key.
using Marking = std::vector<TokenCount>;

struct Arc {
    std::size_t place = 0;
    TokenCount weight = 1;
};

// Plain place/transition net. Arcs carry weights >= 1; at most one input and
// one output arc per (place, transition) pair.
class PetriNet {
public:
    Result<std::size_t> add_place(std::string name);
    Result<std::size_t> add_transition(std::string name);
    Status add_input_arc(std::size_t place, std::size_t transition, TokenCount weight);
    Status add_output_arc(std::size_t place, std::size_t transition, TokenCount weight);

    std::size_t place_count() const { return places_.size(); }
    std::size_t transition_count() const { return transitions_.size(); }
    const std::string& place_name(std::size_t i) const { return places_[i]; }
    const std::string& transition_name(std::size_t i) const { return transitions_[i]; }
    std::optional<std::size_t> find_place(std::string_view name) const;
    std::optional<std::size_t> find_transition(std::string_view name) const;
    const std::vector<Arc>& inputs_of(std::size_t transition) const { return in_[transition]; }
    const std::vector<Arc>& outputs_of(std::size_t transition) const { return out_[transition]; }

private:
    std::vector<std::string> places_;
    std::vector<std::string> transitions_;
    std::vector<std::vector<Arc>> in_;   // per transition
    std::vector<std::vector<Arc>> out_;  // per transition
};

bool is_enabled(const PetriNet& net, const Marking& marking, std::size_t transition);
Result<std::vector<std::size_t>> enabled(const PetriNet& net, const Marking& marking);
Result<Marking> fire(const PetriNet& net, const Marking& marking, std::size_t transition);

struct ReachabilityGraph {
    struct Edge {
        std::size_t from = 0;
        std::size_t transition = 0;
        std::size_t to = 0;
    };
    std::vector<Marking> nodes;  // BFS discovery order; nodes[0] is initial
    std::map<Marking, std::size_t> index;
    std::vector<Edge> edges;
};

struct ReachabilityOptions {
    std::size_t max_nodes = 1'000'000;  // boundedness ceiling
};

Result<ReachabilityGraph> reachability(const PetriNet& net, const Marking& initial,
                                       const ReachabilityOptions& options = {});

// Node ids of markings with no enabled transition.
std::vector<std::size_t> deadlocks(const PetriNet& net, const ReachabilityGraph& graph);

// Farming employment net. n = workdays per position, k = positions (equal to
// the applicants able to apply). Arcs:
//   T1 (new job offer):   P1(1)            -> P2(n*k), P3(n*k)
//   T2 (hiring):          P4(1)            -> P5(1)
//   T3 (workday):         P3(1), P5(1)     -> P5(1), P6(1)
//   T4 (certification):   P2(n*k), P5(k), P6(n*k) -> P7(1)
// Initial marking: P1 = 1, P4 = k, all other places 0.
struct FarmingParams {
    std::uint64_t workdays = 1;  // n
    std::uint64_t workers = 1;   // k
};

struct FarmingNet {
    PetriNet net;
    Marking initial;
};

Result<FarmingNet> build_farming_net(const FarmingParams& params);

std::string marking_label(const PetriNet& net, const Marking& marking);

// Trace conformance. Successful new_job_offer/hiring/workday/certification
// records map to T1/T2/T3/T4; everything else is skipped with a notice.
struct FiringStep {
    std::size_t trace_index = 0;
    std::size_t transition = 0;
};

struct FiringViolation {
    std::size_t trace_index = 0;
    std::size_t transition = 0;
    std::size_t place = 0;       // first underfunded input place
    TokenCount required = 0;
    TokenCount available = 0;
};

struct ConformanceResult {
    std::vector<FiringStep> fired;
    std::vector<std::pair<std::size_t, std::string>> skipped;  // (trace index, note)
    std::optional<FiringViolation> violation;
    Marking final;

    bool conformant() const { return !violation.has_value(); }
    std::vector<std::string> sequence_names(const PetriNet& net) const;
    std::string to_text(const PetriNet& net) const;  // "desfire 1" line format
};

ConformanceResult conformance(const trace::Trace& trace, const PetriNet& net,
                              const Marking& initial,
                              const std::optional<Address>& job = std::nullopt);

// Net definition file ("desnet 1": places, transitions, weighted arcs,
// initial marking) and DOT export of a reachability graph.
std::string to_net_text(const PetriNet& net, const Marking& initial);
Result<FarmingNet> net_from_text(std::string_view text);
std::string to_dot(const PetriNet& net, const ReachabilityGraph& graph);

}  // namespace des::petrinet

#endif
