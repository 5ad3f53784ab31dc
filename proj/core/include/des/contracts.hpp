#ifndef DES_CONTRACTS_HPP
#define DES_CONTRACTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "des/address.hpp"
#include "des/digest.hpp"
#include "des/ledger.hpp"
#include "des/lifecycle.hpp"
#include "des/result.hpp"
#include "des/trace.hpp"

namespace des::contracts {

using ledger::Amount;

struct JobOffer {
    Address employer{};
    std::uint64_t positions = 1;      // k
    std::uint64_t workdays = 1;       // n, per position
    std::uint64_t hours_per_day = 1;
    Amount time_wage = 0;             // tokens per hour
    bool certify = true;              // farming variant issues a certification
    std::string description;

    // k * n * hours_per_day * time_wage, overflow-checked.
    Result<Amount> required_deposit() const;
    std::uint64_t agreed_hours() const { return workdays * hours_per_day; }
    Amount wage_total() const { return agreed_hours() * time_wage; }
};

struct JobAddresses {
    Address deposit{};
    Address application{};
    Address relationship{};
};

struct RelationshipView {
    JobOffer offer;
    JobAddresses addresses;
    std::uint64_t offer_height = 0;
    std::map<Address, Digest> applicants;          // worker -> identification code
    std::map<Address, std::uint64_t> hired;        // worker -> matured hours
    std::set<Address> concluded;
    std::vector<std::pair<Address, Amount>> payments;  // in payment order
    std::optional<Digest> certification;
    Amount escrow = 0;
    bool closed = false;  // all k positions filled and concluded
};

// code = sha256(application contract address, worker address, offer creation
// block height); recomputable from public inputs.
Digest identification_code(const Address& application_addr, const Address& worker,
                           std::uint64_t offer_height);

// cert = sha256(relationship contract address, concluding block height, then
// the paid (worker, amount) pairs in payment order).
Digest certification_code(const Address& relationship_addr, std::uint64_t final_height,
                          const std::vector<std::pair<Address, Amount>>& payments);

// Canonical call payloads (byte-exact; see docs/FORMATS.md).
std::string deploy_payload(const JobOffer& offer);
std::string apply_payload();
std::string hire_payload(const Address& worker, const Digest& code);
std::string workday_payload(const Address& worker);
std::string payment_payload(const Address& worker, Amount amount);
std::string register_payload(lifecycle::Role role, const Address& addr);

// The contract execution engine: owns the deployed contract instances, the
// authority registry and the system accounts, and executes calls dispatched
// by the ledger during block sealing.
class Engine final : public ledger::CallDispatcher {
public:
    explicit Engine(ledger::Ledger& led, trace::TraceSink* sink = nullptr);

    const Address& factory_address() const { return factory_; }
    const Address& registry_address() const { return registry_addr_; }
    const Address& authority_address() const { return authority_; }

    bool handles(const Address& recipient) const override;
    std::string execute(const ledger::Transaction& tx, std::uint64_t height) override;

    const lifecycle::AuthorityRegistry& registry() const { return registry_; }

    std::vector<Address> jobs() const;  // relationship addresses, deploy order
    Result<JobAddresses> job_addresses(const Address& relationship_addr) const;
    Result<RelationshipView> query_relationship(const Address& relationship_addr) const;
    Result<lifecycle::JobMilestones> milestones(const Address& relationship_addr) const;
    lifecycle::Phase derived_state(const Address& relationship_addr, std::uint64_t height) const;

private:
    struct DepositState {
        Address relationship_addr{};  // sole authorized payment caller
        Address offer_ref{};          // application contract address
    };
    struct ApplicationState {
        JobOffer offer;
        std::uint64_t offer_height = 0;
        std::map<Address, Digest> codes;
        Address relationship_addr{};
        Address deposit_addr{};
    };
    struct RelationshipState {
        std::map<Address, std::uint64_t> hired;  // matured hours
        std::set<Address> concluded;
        std::vector<std::pair<Address, Amount>> payments;
        std::optional<Digest> certification;
        Address deposit_addr{};
        Address application_addr{};
    };
    struct Job {
        JobAddresses addrs;
        DepositState deposit;
        ApplicationState application;
        RelationshipState relationship;
        lifecycle::JobMilestones milestones;
    };

    std::string do_deploy(const ledger::Transaction& tx, std::uint64_t height);
    std::string do_register(const ledger::Transaction& tx, std::uint64_t height);
    std::string do_apply(Job& job, const ledger::Transaction& tx, std::uint64_t height);
    std::string do_hire(Job& job, const ledger::Transaction& tx, std::uint64_t height);
    std::string do_workday(Job& job, const ledger::Transaction& tx, std::uint64_t height);
    // The in-contract payment path; caller is the relationship contract.
    std::string pay_worker(Job& job, const Address& caller, const Address& worker, Amount amount,
                           const Digest& tx_id, std::uint64_t height);

    bool job_closed(const Job& job) const;
    void emit(trace::Record record);
    trace::Record base_record(const ledger::Transaction& tx, std::uint64_t height,
                              trace::Kind kind, std::optional<Address> job) const;

    ledger::Ledger& ledger_;
    trace::TraceSink* sink_ = nullptr;
    lifecycle::AuthorityRegistry registry_;
    Address factory_{};
    Address registry_addr_{};
    Address authority_{};
    std::vector<Address> job_order_;
    std::map<Address, Job> jobs_;            // by relationship address
    std::map<Address, Address> by_contract_;  // any contract address -> relationship
};

}  // namespace des::contracts

#endif
