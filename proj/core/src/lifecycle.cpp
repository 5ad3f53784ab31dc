#include "des/lifecycle.hpp"

#include <sstream>

namespace des::lifecycle {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::idle: return "idle";
        case Phase::awaiting_appliers: return "awaiting_appliers";
        case Phase::relationship: return "relationship";
        case Phase::conclusion: return "conclusion";
    }
    return "unknown";
}

std::string_view to_string(Event event) {
    switch (event) {
        case Event::new_job_offer: return "new_job_offer";
        case Event::application: return "application";
        case Event::hiring: return "hiring";
        case Event::workday: return "workday";
        case Event::payment: return "payment";
    }
    return "unknown";
}

std::optional<Phase> transition(Phase phase, Event event) {
    switch (phase) {
        case Phase::idle:
            if (event == Event::new_job_offer) return Phase::awaiting_appliers;
            break;
        case Phase::awaiting_appliers:
            if (event == Event::application) return Phase::awaiting_appliers;
            if (event == Event::hiring) return Phase::relationship;
            break;
        case Phase::relationship:
            if (event == Event::workday) return Phase::relationship;
            if (event == Event::payment) return Phase::conclusion;
            break;
        case Phase::conclusion:
            break;
    }
    return std::nullopt;
}

std::string_view to_string(Role role) {
    return role == Role::employer ? "employer" : "worker";
}

std::optional<Role> role_from_token(std::string_view token) {
    if (token == "employer") return Role::employer;
    if (token == "worker") return Role::worker;
    return std::nullopt;
}

bool AuthorityRegistry::add(Role role, const Address& addr) {
    auto& set = role == Role::employer ? employers_ : workers_;
    return set.insert(addr).second;
}

Status register_member(AuthorityRegistry& registry, Role role, const Address& addr,
                       const std::function<bool(const Address&)>& account_exists) {
    if (!account_exists(addr)) {
        return make_error(Errc::unknown_account, "cannot register unknown address " + addr.hex());
    }
    registry.add(role, addr);
    return Status::success();
}

Phase derive_state(const std::optional<JobMilestones>& milestones, std::uint64_t height) {
    if (!milestones || milestones->deployed_at > height) return Phase::idle;
    if (!milestones->first_hire_at || *milestones->first_hire_at > height) {
        return Phase::awaiting_appliers;
    }
    if (!milestones->concluded_at || *milestones->concluded_at > height) {
        return Phase::relationship;
    }
    return Phase::conclusion;
}

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::ok: return "ok";
        case Verdict::violation: return "violation";
        case Verdict::notice: return "notice";
        case Verdict::skipped: return "skipped";
    }
    return "unknown";
}

std::size_t ConformanceReport::violations() const {
    std::size_t n = 0;
    for (const auto& row : rows) {
        if (row.verdict == Verdict::violation) ++n;
    }
    return n;
}

std::string ConformanceReport::to_text() const {
    std::ostringstream os;
    os << "desrep 1\n";
    for (const auto& row : rows) {
        os << row.index << ' ' << trace::kind_token(row.kind) << ' ' << to_string(row.before)
           << ' ' << to_string(row.verdict) << ' '
           << trace::pct_encode(row.note) << '\n';
    }
    for (const auto& [job, phase] : final_states) {
        os << "final " << job.hex() << ' ' << to_string(phase) << '\n';
    }
    if (conformant()) {
        os << "summary conformant\n";
    } else {
        os << "summary violations=" << violations() << '\n';
    }
    return os.str();
}

namespace {

std::optional<Event> event_for(const trace::Record& record) {
    switch (record.kind) {
        case trace::Kind::new_job_offer: return Event::new_job_offer;
        case trace::Kind::application: return Event::application;
        case trace::Kind::hiring: return Event::hiring;
        case trace::Kind::workday: return Event::workday;
        case trace::Kind::payment: return Event::payment;
        default: return std::nullopt;
    }
}

}  // namespace

ConformanceReport monitor(const trace::Trace& trace) {
    ConformanceReport report;
    std::map<Address, Phase> phase;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& rec = trace[i];
        ConformanceRow row;
        row.index = i;
        row.kind = rec.kind;
        row.job = rec.job;
        if (!rec.job) {
            continue;  // ledger-level record, not a lifecycle event
        }
        Phase before = Phase::idle;
        if (auto it = phase.find(*rec.job); it != phase.end()) before = it->second;
        row.before = before;
        if (!rec.ok) {
            row.verdict = Verdict::skipped;
            row.note = "rejected call";
            report.rows.push_back(std::move(row));
            continue;
        }
        auto event = event_for(rec);
        if (!event) {
            row.verdict = Verdict::notice;
            row.note = "no lifecycle event";
            report.rows.push_back(std::move(row));
            continue;
        }
        if (*event == Event::payment && rec.detail("concludes") != std::optional<std::string>("1")) {
            // Intermediate wage payment of a multi-worker job; the job-level
            // phase moves only when the last worker concludes.
            row.verdict = Verdict::notice;
            row.note = "intermediate wage payment";
            report.rows.push_back(std::move(row));
            continue;
        }
        if (*event == Event::hiring && rec.detail("first") == std::optional<std::string>("0")) {
            // Filling a further position of an already-running job.
            row.verdict = Verdict::notice;
            row.note = "additional hire";
            report.rows.push_back(std::move(row));
            continue;
        }
        auto next = transition(before, *event);
        if (next) {
            phase[*rec.job] = *next;
            row.verdict = Verdict::ok;
        } else {
            row.verdict = Verdict::violation;
            row.note = std::string("no edge for ") + std::string(to_string(*event)) + " in " +
                       std::string(to_string(before));
        }
        report.rows.push_back(std::move(row));
    }
    report.final_states = std::move(phase);
    return report;
}

}  // namespace des::lifecycle
