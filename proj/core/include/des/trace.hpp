#ifndef DES_TRACE_HPP
#define DES_TRACE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "des/address.hpp"
#include "des/digest.hpp"
#include "des/result.hpp"

namespace des::trace {

// One record per executed ledger event, in execution order. Records are
// derived purely from transaction execution, so replaying the sealed chain
// regenerates the identical trace.
enum class Kind {
    genesis,        // genesis funding mint
    register_role,  // central-authority registration
    transfer,       // plain value transfer
    new_job_offer,  // contract deployment (escrow funded)
    application,    // worker application, identification code issued
    hiring,         // worker enters the hired set
    workday,        // matured hours incremented
    payment,        // wage moved from escrow to a worker
    certification,  // saleability certification code issued
};

std::string_view kind_token(Kind kind);
std::optional<Kind> kind_from_token(std::string_view token);

struct Record {
    std::uint64_t height = 0;
    std::optional<Digest> tx_id;     // absent for genesis mints
    Kind kind = Kind::transfer;
    Address actor{};                 // sender / credited party for payments
    std::optional<Address> job;      // relationship contract address
    bool ok = true;
    std::string reason;              // failure token when !ok
    // Ordered key=value state deltas (amount, hours, code, concludes, ...).
    std::vector<std::pair<std::string, std::string>> details;

    std::optional<std::string> detail(std::string_view key) const;
};

using Trace = std::vector<Record>;

class TraceSink {
public:
    void emit(Record record) { records_.push_back(std::move(record)); }
    const Trace& records() const { return records_; }
    Trace take() { return std::move(records_); }
    void clear() { records_.clear(); }

private:
    Trace records_;
};

// Percent-encoding used by every line format: '%', space, TAB, CR, LF and
// '-' are escaped; the empty string is written as a single '-'.
std::string pct_encode(std::string_view raw);
Result<std::string> pct_decode(std::string_view encoded);

std::string to_line(const Record& record);
Result<Record> record_from_line(std::string_view line);

// File form: "destrc 1" header then one record per line.
std::string to_text(const Trace& trace);
Result<Trace> trace_from_text(std::string_view text);

}  // namespace des::trace

#endif
