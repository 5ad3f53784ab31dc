#ifndef DES_SCENARIO_HPP
#define DES_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "des/contracts.hpp"
#include "des/ledger.hpp"
#include "des/result.hpp"

namespace des::harness {

using ledger::Amount;

// One actor event. Actors and jobs are referenced by scenario-local names;
// the runner resolves them to addresses.
struct Step {
    enum class Kind {
        deploy,     // deploy <employer> <job> k= n= hours= wage= certify= [desc=] [deposit=]
        apply,      // apply <worker> <job>
        hire,       // hire <employer> <job> <worker>          (uses the stored code)
        hire_code,  // hire_code <employer> <job> <worker> <code_hex>
        workday,    // workday <employer> <job> <worker>
        pay,        // pay <caller> <job> <worker> <amount>    (direct payment attempt)
        transfer,   // transfer <from> <to> <amount>
        seal,       // seal
        query,      // query <job>
        tamper,     // tamper <height> <offset> [xor]
    };

    Kind kind = Kind::seal;
    std::size_t line = 0;
    std::string actor;
    std::string job;
    std::string worker;
    std::string to;
    Amount amount = 0;
    contracts::JobOffer offer;  // deploy parameters (employer resolved later)
    std::optional<Amount> deposit_override;
    std::string code_hex;
    std::uint64_t height = 0;
    std::size_t offset = 0;
    std::uint8_t xor_mask = 0x01;
};

struct Expectation {
    enum class Subject { fsm, net, chain };
    Subject subject = Subject::fsm;
    bool positive = true;  // conformant / valid
};

struct Scenario {
    std::uint64_t seed = 0;
    std::vector<ledger::GenesisEntry> genesis;
    std::vector<std::string> employers;  // seeds, registered via authority transactions
    std::vector<std::string> workers;
    std::vector<Step> steps;
    std::vector<Expectation> expects;

    static Result<Scenario> parse(std::string_view text);
};

Result<std::string> read_file(const std::string& path);
Status write_file(const std::string& path, std::string_view content);

}  // namespace des::harness

#endif
