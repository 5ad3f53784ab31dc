#ifndef DES_LEDGER_HPP
#define DES_LEDGER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "des/address.hpp"
#include "des/digest.hpp"
#include "des/result.hpp"
#include "des/trace.hpp"

namespace des::ledger {

using Amount = std::uint64_t;

struct Account {
    Address address{};
    Amount balance = 0;
    std::uint64_t nonce = 0;  // count of transactions sent
};

struct Transaction {
    Address sender{};
    Address recipient{};
    Amount amount = 0;
    std::string payload;        // contract call data, empty for plain transfers
    std::uint64_t nonce = 0;    // sender nonce, 1-based
    Digest tx_id{};

    // tx_id = sha256 over the framed fields (sender, recipient, amount,
    // payload, nonce).
    Digest compute_id() const;
};

Transaction make_transaction(const Address& sender, const Address& recipient, Amount amount,
                             std::string payload, std::uint64_t nonce);

enum class TxStatus : std::uint8_t { ok = 0, failed = 1 };

// Transactions stay in the block even when execution fails; the ledger is a
// complete audit record.
struct SealedTx {
    Transaction tx;
    TxStatus status = TxStatus::ok;
    std::string reason;  // failure token, empty when ok
};

struct Block {
    std::uint64_t index = 0;
    Digest prev_hash{};  // all-zero for the genesis block
    std::vector<SealedTx> txs;
    Digest block_hash{};

    // Framed hash input: index, prev_hash, tx count, then one field per
    // transaction (itself the framed concatenation of the transaction's
    // fields plus status and reason).
    std::vector<std::uint8_t> canonical_bytes() const;
    Digest compute_hash() const;
};

struct TxReceipt {
    Digest tx_id{};
    bool accepted = false;
    std::string reason;
};

struct ValidationReport {
    bool valid = true;
    std::uint64_t first_bad_height = 0;
    std::string reason;
};

struct GenesisEntry {
    std::string seed;
    Amount balance = 0;
};

// Contract execution hook, implemented by contracts::Engine. For handled
// recipients the dispatcher owns value movement; a failed call moves nothing.
class CallDispatcher {
public:
    virtual ~CallDispatcher() = default;
    virtual bool handles(const Address& recipient) const = 0;
    // Returns the failure token, empty string on success.
    virtual std::string execute(const Transaction& tx, std::uint64_t height) = 0;
};

class Ledger {
public:
    // Funds the listed accounts in the genesis block; the only minting event.
    static Result<Ledger> create(const std::vector<GenesisEntry>& genesis,
                                 trace::TraceSink* sink = nullptr);
    // Rebuild genesis state from an imported genesis block (chain replay).
    static Result<Ledger> from_genesis_block(const Block& genesis,
                                             trace::TraceSink* sink = nullptr);

    Result<Address> create_account(std::string_view seed);
    bool account_exists(const Address& addr) const;
    Result<Amount> balance(const Address& addr) const;
    Result<std::uint64_t> account_nonce(const Address& addr) const;
    std::vector<Address> accounts() const;  // sorted by address bytes

    TxReceipt submit_transaction(const Transaction& tx);
    const Block& seal_block();
    ValidationReport validate_chain() const;

    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& head() const { return blocks_.back(); }
    std::uint64_t height() const { return blocks_.back().index; }
    std::size_t pending_count() const { return pool_.size(); }

    Amount genesis_total() const { return genesis_total_; }
    Amount circulating_total() const;  // sum over all account balances

    void set_dispatcher(CallDispatcher* dispatcher) { dispatcher_ = dispatcher; }

    // Seal-time primitives for the dispatcher. Only legal while a block is
    // being sealed.
    Status transfer_in_seal(const Address& from, const Address& to, Amount amount);
    Result<Address> create_account_in_seal(std::string_view seed);
    std::uint64_t sealing_height() const { return static_cast<std::uint64_t>(blocks_.size()); }

    // Tamper support (tests and the scenario `tamper` verb): XOR one data
    // byte of a sealed block. Offsets address the value bytes of the block's
    // fields in serialization order (framing length prefixes excluded),
    // with the stored block hash as the final 32 bytes.
    std::size_t block_value_byte_count(std::uint64_t height) const;
    Status tamper_block(std::uint64_t height, std::size_t offset, std::uint8_t xor_mask);

private:
    Ledger() = default;

    const Account* find(const Address& addr) const;
    Account* find(const Address& addr);
    std::string execute_tx(const Transaction& tx, std::uint64_t height);
    void seal_genesis(std::vector<SealedTx> mints);

    std::map<Address, Account> accounts_;
    std::vector<Block> blocks_;
    std::vector<Transaction> pool_;
    std::map<Address, std::uint64_t> pending_from_;  // in-pool tx count per sender
    Amount genesis_total_ = 0;
    CallDispatcher* dispatcher_ = nullptr;
    trace::TraceSink* sink_ = nullptr;
    bool sealing_ = false;
};

ValidationReport validate_blocks(std::span<const Block> blocks);

// Chain file: "deschain 1" header, then one block per line in canonical
// field order (see docs/FORMATS.md).
std::string chain_to_text(std::span<const Block> blocks);
Result<std::vector<Block>> chain_from_text(std::string_view text);

}  // namespace des::ledger

#endif
