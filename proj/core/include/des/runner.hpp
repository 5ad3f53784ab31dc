#ifndef DES_RUNNER_HPP
#define DES_RUNNER_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "des/contracts.hpp"
#include "des/ledger.hpp"
#include "des/lifecycle.hpp"
#include "des/petrinet.hpp"
#include "des/scenario.hpp"
#include "des/trace.hpp"

namespace des::harness {

struct StepOutcome {
    std::size_t line = 0;
    std::string verb;
    bool accepted = true;  // submit receipt / step-level success
    std::string note;
};

struct JobNetReport {
    std::string name;
    Address relationship{};
    petrinet::FarmingParams params;
    petrinet::ConformanceResult result;
};

// A full deterministic execution of one scenario: the world itself plus the
// derived trace and both conformance reports.
struct RunResult {
    std::unique_ptr<trace::TraceSink> sink;
    std::unique_ptr<ledger::Ledger> ledger;
    std::unique_ptr<contracts::Engine> engine;

    std::vector<StepOutcome> outcomes;
    std::map<std::string, Address> actors;
    std::map<std::string, contracts::JobAddresses> jobs_by_name;

    lifecycle::ConformanceReport fsm;
    std::vector<JobNetReport> nets;
    ledger::ValidationReport validation;
    bool conservation_ok = true;
    std::uint64_t first_conservation_break = 0;
    bool tampered = false;

    std::vector<std::string> expectation_failures;  // empty when all expectations hold

    const trace::Trace& trace() const { return sink->records(); }
    bool net_conformant() const;
    std::string summary_text() const;
};

Result<RunResult> run_scenario(const Scenario& scenario);

// Rebuilds the world from a sealed chain alone: genesis state from block 0,
// then resubmit and reseal every block, checking hashes on the way. The
// returned trace must equal the original run's trace byte for byte.
struct ReplayResult {
    std::unique_ptr<trace::TraceSink> sink;
    std::unique_ptr<ledger::Ledger> ledger;
    std::unique_ptr<contracts::Engine> engine;

    const trace::Trace& trace() const { return sink->records(); }
};

Result<ReplayResult> replay_chain(std::span<const ledger::Block> blocks);

}  // namespace des::harness

#endif
