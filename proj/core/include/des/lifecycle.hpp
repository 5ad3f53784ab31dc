#ifndef DES_LIFECYCLE_HPP
#define DES_LIFECYCLE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "des/address.hpp"
#include "des/result.hpp"
#include "des/trace.hpp"

namespace des::lifecycle {

// Employment phases of one job.
enum class Phase { idle, awaiting_appliers, relationship, conclusion };

enum class Event { new_job_offer, application, hiring, workday, payment };

inline constexpr std::array<Phase, 4> kAllPhases = {
    Phase::idle, Phase::awaiting_appliers, Phase::relationship, Phase::conclusion};
inline constexpr std::array<Event, 5> kAllEvents = {
    Event::new_job_offer, Event::application, Event::hiring, Event::workday, Event::payment};

std::string_view to_string(Phase phase);
std::string_view to_string(Event event);

// Pure total transition function. Exactly five (phase, event) pairs are
// accepted, counting the internal self-loops; everything else returns
// nullopt.
std::optional<Phase> transition(Phase phase, Event event);

enum class Role { employer, worker };

std::string_view to_string(Role role);
std::optional<Role> role_from_token(std::string_view token);

// Central-authority whitelist: who may open job offers and who may apply.
class AuthorityRegistry {
public:
    // Idempotent; returns false when the member was already present.
    bool add(Role role, const Address& addr);
    bool is_employer(const Address& addr) const { return employers_.count(addr) != 0; }
    bool is_worker(const Address& addr) const { return workers_.count(addr) != 0; }
    const std::set<Address>& employers() const { return employers_; }
    const std::set<Address>& workers() const { return workers_; }

private:
    std::set<Address> employers_;
    std::set<Address> workers_;
};

Status register_member(AuthorityRegistry& registry, Role role, const Address& addr,
                       const std::function<bool(const Address&)>& account_exists);

// Block heights of the phase-changing milestones of one job.
struct JobMilestones {
    std::uint64_t deployed_at = 0;
    std::optional<std::uint64_t> first_hire_at;
    std::optional<std::uint64_t> concluded_at;
};

// Projects on-chain contract state onto the phase diagram. nullopt milestones
// mean the job does not exist (idle).
Phase derive_state(const std::optional<JobMilestones>& milestones, std::uint64_t height);

enum class Verdict { ok, violation, notice, skipped };

std::string_view to_string(Verdict verdict);

struct ConformanceRow {
    std::size_t index = 0;  // trace record index
    trace::Kind kind = trace::Kind::transfer;
    std::optional<Address> job;
    Phase before = Phase::idle;
    Verdict verdict = Verdict::skipped;
    std::string note;
};

struct ConformanceReport {
    std::vector<ConformanceRow> rows;
    std::map<Address, Phase> final_states;

    std::size_t violations() const;
    bool conformant() const { return violations() == 0; }
    std::string to_text() const;  // "desrep 1" line format
};

// Replays a trace through transition() per job. Successful contract events
// must arrive on a phase edge; rejected calls and non-lifecycle records are
// skipped. Wage payments that do not conclude the job are internal and only
// noticed, matching the per-job reading of the phase diagram.
ConformanceReport monitor(const trace::Trace& trace);

}  // namespace des::lifecycle

#endif
