#include "des/petrinet.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace des::petrinet {

Result<std::size_t> PetriNet::add_place(std::string name) {
    if (name.empty()) return make_error(Errc::invalid_argument, "empty place name");
    if (find_place(name)) return make_error(Errc::invalid_argument, "duplicate place " + name);
    places_.push_back(std::move(name));
    return places_.size() - 1;
}

Result<std::size_t> PetriNet::add_transition(std::string name) {
    if (name.empty()) return make_error(Errc::invalid_argument, "empty transition name");
    if (find_transition(name)) {
        return make_error(Errc::invalid_argument, "duplicate transition " + name);
    }
    transitions_.push_back(std::move(name));
    in_.emplace_back();
    out_.emplace_back();
    return transitions_.size() - 1;
}

static Status add_arc(std::vector<Arc>& arcs, std::size_t place, TokenCount weight,
                      std::size_t place_count) {
    if (place >= place_count) return make_error(Errc::invalid_argument, "arc place out of range");
    if (weight < 1) return make_error(Errc::invalid_argument, "arc weight must be >= 1");
    for (const Arc& a : arcs) {
        if (a.place == place) {
            return make_error(Errc::invalid_argument, "duplicate arc for place/transition pair");
        }
    }
    arcs.push_back(Arc{place, weight});
    return Status::success();
}

Status PetriNet::add_input_arc(std::size_t place, std::size_t transition, TokenCount weight) {
    if (transition >= transitions_.size()) {
        return make_error(Errc::invalid_argument, "arc transition out of range");
    }
    return add_arc(in_[transition], place, weight, places_.size());
}

Status PetriNet::add_output_arc(std::size_t place, std::size_t transition, TokenCount weight) {
    if (transition >= transitions_.size()) {
        return make_error(Errc::invalid_argument, "arc transition out of range");
    }
    return add_arc(out_[transition], place, weight, places_.size());
}

std::optional<std::size_t> PetriNet::find_place(std::string_view name) const {
    for (std::size_t i = 0; i < places_.size(); ++i) {
        if (places_[i] == name) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> PetriNet::find_transition(std::string_view name) const {
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        if (transitions_[i] == name) return i;
    }
    return std::nullopt;
}

bool is_enabled(const PetriNet& net, const Marking& marking, std::size_t transition) {
    for (const Arc& a : net.inputs_of(transition)) {
        if (marking[a.place] < a.weight) return false;
    }
    return true;
}

Result<std::vector<std::size_t>> enabled(const PetriNet& net, const Marking& marking) {
    if (marking.size() != net.place_count()) {
        return make_error(Errc::shape_mismatch, "marking length does not match place count");
    }
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
        if (is_enabled(net, marking, t)) out.push_back(t);
    }
    return out;
}

Result<Marking> fire(const PetriNet& net, const Marking& marking, std::size_t transition) {
    if (marking.size() != net.place_count()) {
        return make_error(Errc::shape_mismatch, "marking length does not match place count");
    }
    if (transition >= net.transition_count()) {
        return make_error(Errc::invalid_argument, "transition out of range");
    }
    if (!is_enabled(net, marking, transition)) {
        return make_error(Errc::not_enabled,
                          net.transition_name(transition) + " is not enabled");
    }
    Marking next = marking;
    for (const Arc& a : net.inputs_of(transition)) next[a.place] -= a.weight;
    for (const Arc& a : net.outputs_of(transition)) next[a.place] += a.weight;
    return next;
}

Result<ReachabilityGraph> reachability(const PetriNet& net, const Marking& initial,
                                       const ReachabilityOptions& options) {
    if (initial.size() != net.place_count()) {
        return make_error(Errc::shape_mismatch, "marking length does not match place count");
    }
    ReachabilityGraph graph;
    graph.nodes.push_back(initial);
    graph.index[initial] = 0;
    std::deque<std::size_t> frontier{0};
    while (!frontier.empty()) {
        std::size_t id = frontier.front();
        frontier.pop_front();
        Marking m = graph.nodes[id];  // copy: nodes may reallocate below
        for (std::size_t t = 0; t < net.transition_count(); ++t) {
            if (!is_enabled(net, m, t)) continue;
            Marking next = m;
            for (const Arc& a : net.inputs_of(t)) next[a.place] -= a.weight;
            for (const Arc& a : net.outputs_of(t)) next[a.place] += a.weight;
            auto [it, inserted] = graph.index.try_emplace(next, graph.nodes.size());
            if (inserted) {
                if (graph.nodes.size() >= options.max_nodes) {
                    return make_error(Errc::bounded_out,
                                      "node ceiling " + std::to_string(options.max_nodes) +
                                          " exceeded; net may be unbounded");
                }
                graph.nodes.push_back(std::move(next));
                frontier.push_back(it->second);
            }
            graph.edges.push_back(ReachabilityGraph::Edge{id, t, it->second});
        }
    }
    return graph;
}

std::vector<std::size_t> deadlocks(const PetriNet& net, const ReachabilityGraph& graph) {
    std::vector<std::size_t> out;
    for (std::size_t id = 0; id < graph.nodes.size(); ++id) {
        bool any = false;
        for (std::size_t t = 0; t < net.transition_count() && !any; ++t) {
            any = is_enabled(net, graph.nodes[id], t);
        }
        if (!any) out.push_back(id);
    }
    return out;
}

Result<FarmingNet> build_farming_net(const FarmingParams& params) {
    if (params.workdays < 1 || params.workers < 1) {
        return make_error(Errc::invalid_argument, "farming net wants n >= 1 and k >= 1");
    }
    const TokenCount n = params.workdays;
    const TokenCount k = params.workers;
    FarmingNet fn;
    PetriNet& net = fn.net;
    std::size_t p[8] = {};
    for (int i = 1; i <= 7; ++i) {
        p[i] = net.add_place("P" + std::to_string(i)).value();
    }
    std::size_t t1 = net.add_transition("T1").value();
    std::size_t t2 = net.add_transition("T2").value();
    std::size_t t3 = net.add_transition("T3").value();
    std::size_t t4 = net.add_transition("T4").value();

    // T1: the job offer locks the wage deposit (P2) and opens n*k position
    // workdays (P3).
    (void)net.add_input_arc(p[1], t1, 1);
    (void)net.add_output_arc(p[2], t1, n * k);
    (void)net.add_output_arc(p[3], t1, n * k);
    // T2: hiring moves one applicant to working.
    (void)net.add_input_arc(p[4], t2, 1);
    (void)net.add_output_arc(p[5], t2, 1);
    // T3: a workday consumes one open position day and matures one day,
    // with the working token as catalyst.
    (void)net.add_input_arc(p[3], t3, 1);
    (void)net.add_input_arc(p[5], t3, 1);
    (void)net.add_output_arc(p[5], t3, 1);
    (void)net.add_output_arc(p[6], t3, 1);
    // T4: certification consumes the full deposit, the matured days and the
    // working tokens, and produces the salable-goods token.
    (void)net.add_input_arc(p[2], t4, n * k);
    (void)net.add_input_arc(p[5], t4, k);
    (void)net.add_input_arc(p[6], t4, n * k);
    (void)net.add_output_arc(p[7], t4, 1);

    fn.initial = Marking(net.place_count(), 0);
    fn.initial[p[1]] = 1;
    fn.initial[p[4]] = k;
    return fn;
}

std::string marking_label(const PetriNet& net, const Marking& marking) {
    std::string out;
    for (std::size_t i = 0; i < marking.size(); ++i) {
        if (marking[i] == 0) continue;
        if (!out.empty()) out.push_back(' ');
        out += net.place_name(i) + ":" + std::to_string(marking[i]);
    }
    if (out.empty()) out = "0";
    return out;
}

namespace {

std::optional<std::string_view> farming_transition_for(trace::Kind kind) {
    switch (kind) {
        case trace::Kind::new_job_offer: return "T1";
        case trace::Kind::hiring: return "T2";
        case trace::Kind::workday: return "T3";
        case trace::Kind::certification: return "T4";
        default: return std::nullopt;
    }
}

}  // namespace

ConformanceResult conformance(const trace::Trace& trace, const PetriNet& net,
                              const Marking& initial, const std::optional<Address>& job) {
    ConformanceResult result;
    result.final = initial;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& rec = trace[i];
        if (job && rec.job != job) {
            continue;
        }
        if (!rec.ok) {
            result.skipped.emplace_back(i, "rejected call");
            continue;
        }
        auto tname = farming_transition_for(rec.kind);
        if (!tname) {
            result.skipped.emplace_back(
                i, std::string(trace::kind_token(rec.kind)) + " has no transition");
            continue;
        }
        auto t = net.find_transition(*tname);
        if (!t) {
            result.skipped.emplace_back(i, "net has no transition " + std::string(*tname));
            continue;
        }
        if (!is_enabled(net, result.final, *t)) {
            FiringViolation v;
            v.trace_index = i;
            v.transition = *t;
            for (const Arc& a : net.inputs_of(*t)) {
                if (result.final[a.place] < a.weight) {
                    v.place = a.place;
                    v.required = a.weight;
                    v.available = result.final[a.place];
                    break;
                }
            }
            result.violation = v;
            return result;
        }
        result.final = fire(net, result.final, *t).value();
        result.fired.push_back(FiringStep{i, *t});
    }
    return result;
}

std::vector<std::string> ConformanceResult::sequence_names(const PetriNet& net) const {
    std::vector<std::string> out;
    out.reserve(fired.size());
    for (const auto& step : fired) out.push_back(net.transition_name(step.transition));
    return out;
}

std::string ConformanceResult::to_text(const PetriNet& net) const {
    std::ostringstream os;
    os << "desfire 1\n";
    for (const auto& step : fired) {
        os << "fire " << step.trace_index << ' ' << net.transition_name(step.transition) << '\n';
    }
    for (const auto& [idx, note] : skipped) {
        os << "skip " << idx << ' ' << trace::pct_encode(note) << '\n';
    }
    if (violation) {
        os << "violation index=" << violation->trace_index
           << " transition=" << net.transition_name(violation->transition)
           << " place=" << net.place_name(violation->place) << " required=" << violation->required
           << " available=" << violation->available << '\n';
    } else {
        os << "sequence";
        for (const auto& step : fired) os << ' ' << net.transition_name(step.transition);
        os << '\n';
        os << "final " << trace::pct_encode(marking_label(net, final)) << '\n';
    }
    return os.str();
}

std::string to_net_text(const PetriNet& net, const Marking& initial) {
    std::ostringstream os;
    os << "desnet 1\n";
    for (std::size_t i = 0; i < net.place_count(); ++i) {
        os << "place " << net.place_name(i) << '\n';
    }
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
        os << "transition " << net.transition_name(t) << '\n';
    }
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
        for (const Arc& a : net.inputs_of(t)) {
            os << "in " << net.place_name(a.place) << ' ' << net.transition_name(t) << ' '
               << a.weight << '\n';
        }
        for (const Arc& a : net.outputs_of(t)) {
            os << "out " << net.place_name(a.place) << ' ' << net.transition_name(t) << ' '
               << a.weight << '\n';
        }
    }
    for (std::size_t i = 0; i < initial.size(); ++i) {
        if (initial[i] != 0) {
            os << "marking " << net.place_name(i) << ' ' << initial[i] << '\n';
        }
    }
    return os.str();
}

Result<FarmingNet> net_from_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != "desnet 1") {
        return make_error(Errc::parse_error, "missing desnet 1 header");
    }
    FarmingNet fn;
    std::size_t lineno = 1;
    std::vector<std::pair<std::string, TokenCount>> marks;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls{line};
        std::string verb;
        ls >> verb;
        auto fail = [&](const std::string& what) {
            return make_error(Errc::parse_error,
                              "net line " + std::to_string(lineno) + ": " + what);
        };
        if (verb == "place") {
            std::string name;
            if (!(ls >> name)) return fail("place wants a name");
            auto r = fn.net.add_place(name);
            if (!r) return fail(r.error().message);
        } else if (verb == "transition") {
            std::string name;
            if (!(ls >> name)) return fail("transition wants a name");
            auto r = fn.net.add_transition(name);
            if (!r) return fail(r.error().message);
        } else if (verb == "in" || verb == "out") {
            std::string pname, tname;
            TokenCount weight = 0;
            if (!(ls >> pname >> tname >> weight)) return fail("arc wants place transition weight");
            auto p = fn.net.find_place(pname);
            auto t = fn.net.find_transition(tname);
            if (!p) return fail("unknown place " + pname);
            if (!t) return fail("unknown transition " + tname);
            Status s = verb == "in" ? fn.net.add_input_arc(*p, *t, weight)
                                    : fn.net.add_output_arc(*p, *t, weight);
            if (!s) return fail(s.error().message);
        } else if (verb == "marking") {
            std::string pname;
            TokenCount count = 0;
            if (!(ls >> pname >> count)) return fail("marking wants place count");
            marks.emplace_back(pname, count);
        } else {
            return fail("unknown verb " + verb);
        }
    }
    fn.initial = Marking(fn.net.place_count(), 0);
    for (const auto& [pname, count] : marks) {
        auto p = fn.net.find_place(pname);
        if (!p) return make_error(Errc::parse_error, "marking for unknown place " + pname);
        fn.initial[*p] = count;
    }
    return fn;
}

std::string to_dot(const PetriNet& net, const ReachabilityGraph& graph) {
    std::ostringstream os;
    os << "digraph reachability {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=ellipse];\n";
    for (std::size_t id = 0; id < graph.nodes.size(); ++id) {
        bool dead = true;
        for (std::size_t t = 0; t < net.transition_count() && dead; ++t) {
            dead = !is_enabled(net, graph.nodes[id], t);
        }
        os << "  n" << id << " [label=\"" << marking_label(net, graph.nodes[id]) << '"';
        if (id == 0) os << ", style=bold";
        if (dead) os << ", peripheries=2";
        os << "];\n";
    }
    for (const auto& e : graph.edges) {
        os << "  n" << e.from << " -> n" << e.to << " [label=\""
           << net.transition_name(e.transition) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace des::petrinet
