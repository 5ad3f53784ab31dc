#include "des/ledger.hpp"

#include <algorithm>
#include <sstream>

namespace des::ledger {

namespace {

constexpr std::string_view kGenesisPayload = "genesis";

trace::Record transfer_record(const Transaction& tx, std::uint64_t height, bool ok,
                              std::string reason) {
    trace::Record r;
    r.height = height;
    r.tx_id = tx.tx_id;
    r.kind = trace::Kind::transfer;
    r.actor = tx.sender;
    r.ok = ok;
    r.reason = std::move(reason);
    r.details.emplace_back("to", tx.recipient.hex());
    r.details.emplace_back("amount", std::to_string(tx.amount));
    return r;
}

}  // namespace

Digest Transaction::compute_id() const {
    HashWriter w;
    w.field(sender.bytes);
    w.field(recipient.bytes);
    w.field_u64(amount);
    w.field(payload);
    w.field_u64(nonce);
    return w.digest();
}

Transaction make_transaction(const Address& sender, const Address& recipient, Amount amount,
                             std::string payload, std::uint64_t nonce) {
    Transaction tx;
    tx.sender = sender;
    tx.recipient = recipient;
    tx.amount = amount;
    tx.payload = std::move(payload);
    tx.nonce = nonce;
    tx.tx_id = tx.compute_id();
    return tx;
}

static void frame_sealed_tx(HashWriter& w, const SealedTx& s) {
    HashWriter txw;
    txw.field(s.tx.sender.bytes);
    txw.field(s.tx.recipient.bytes);
    txw.field_u64(s.tx.amount);
    txw.field(s.tx.payload);
    txw.field_u64(s.tx.nonce);
    txw.field(s.tx.tx_id);
    txw.field_u8(static_cast<std::uint8_t>(s.status));
    txw.field(s.reason);
    w.field(txw.bytes());
}

std::vector<std::uint8_t> Block::canonical_bytes() const {
    HashWriter w;
    w.field_u64(index);
    w.field(prev_hash);
    w.field_u64(static_cast<std::uint64_t>(txs.size()));
    for (const auto& s : txs) frame_sealed_tx(w, s);
    return w.bytes();
}

Digest Block::compute_hash() const {
    auto bytes = canonical_bytes();
    return sha256(std::span<const std::uint8_t>(bytes.data(), bytes.size()));
}

Result<Ledger> Ledger::create(const std::vector<GenesisEntry>& genesis, trace::TraceSink* sink) {
    Ledger led;
    led.sink_ = sink;
    std::vector<SealedTx> mints;
    for (const auto& entry : genesis) {
        auto addr = led.create_account(entry.seed);
        if (!addr) return addr.error();
        led.accounts_[addr.value()].balance = entry.balance;
        led.genesis_total_ += entry.balance;
        Transaction mint = make_transaction(kMintAddress, addr.value(), entry.balance,
                                            std::string(kGenesisPayload), 0);
        mints.push_back(SealedTx{std::move(mint), TxStatus::ok, {}});
    }
    led.seal_genesis(std::move(mints));
    return led;
}

Result<Ledger> Ledger::from_genesis_block(const Block& genesis, trace::TraceSink* sink) {
    if (genesis.index != 0 || !std::all_of(genesis.prev_hash.begin(), genesis.prev_hash.end(),
                                           [](std::uint8_t b) { return b == 0; })) {
        return make_error(Errc::parse_error, "not a genesis block");
    }
    Ledger led;
    led.sink_ = sink;
    std::vector<SealedTx> mints;
    for (const auto& s : genesis.txs) {
        if (!s.tx.sender.is_zero() || s.tx.payload != kGenesisPayload ||
            s.status != TxStatus::ok) {
            return make_error(Errc::parse_error, "genesis block holds a non-mint transaction");
        }
        if (led.accounts_.count(s.tx.recipient)) {
            return make_error(Errc::duplicate_account, "duplicate genesis account");
        }
        led.accounts_[s.tx.recipient] = Account{s.tx.recipient, s.tx.amount, 0};
        led.genesis_total_ += s.tx.amount;
        mints.push_back(s);
    }
    led.seal_genesis(std::move(mints));
    if (led.head().block_hash != genesis.block_hash) {
        return make_error(Errc::parse_error, "genesis block hash mismatch");
    }
    return led;
}

void Ledger::seal_genesis(std::vector<SealedTx> mints) {
    Block b;
    b.index = 0;
    b.txs = std::move(mints);
    b.block_hash = b.compute_hash();
    if (sink_) {
        for (const auto& s : b.txs) {
            trace::Record r;
            r.height = 0;
            r.tx_id = s.tx.tx_id;
            r.kind = trace::Kind::genesis;
            r.actor = s.tx.recipient;
            r.details.emplace_back("amount", std::to_string(s.tx.amount));
            sink_->emit(std::move(r));
        }
    }
    blocks_.push_back(std::move(b));
}

Result<Address> Ledger::create_account(std::string_view seed) {
    if (seed.empty()) {
        return make_error(Errc::invalid_argument, "empty account seed");
    }
    Address addr = Address::from_seed(seed);
    if (accounts_.count(addr)) {
        return make_error(Errc::duplicate_account, "account already exists: " + addr.hex());
    }
    accounts_[addr] = Account{addr, 0, 0};
    return addr;
}

bool Ledger::account_exists(const Address& addr) const {
    return accounts_.count(addr) != 0;
}

const Account* Ledger::find(const Address& addr) const {
    auto it = accounts_.find(addr);
    return it == accounts_.end() ? nullptr : &it->second;
}

Account* Ledger::find(const Address& addr) {
    auto it = accounts_.find(addr);
    return it == accounts_.end() ? nullptr : &it->second;
}

Result<Amount> Ledger::balance(const Address& addr) const {
    const Account* a = find(addr);
    if (!a) return make_error(Errc::unknown_account, "unknown address: " + addr.hex());
    return a->balance;
}

Result<std::uint64_t> Ledger::account_nonce(const Address& addr) const {
    const Account* a = find(addr);
    if (!a) return make_error(Errc::unknown_account, "unknown address: " + addr.hex());
    return a->nonce;
}

std::vector<Address> Ledger::accounts() const {
    std::vector<Address> out;
    out.reserve(accounts_.size());
    for (const auto& [addr, _] : accounts_) out.push_back(addr);
    return out;
}

Amount Ledger::circulating_total() const {
    Amount total = 0;
    for (const auto& [_, acct] : accounts_) total += acct.balance;
    return total;
}

TxReceipt Ledger::submit_transaction(const Transaction& tx) {
    TxReceipt receipt;
    receipt.tx_id = tx.tx_id;
    if (tx.tx_id != tx.compute_id()) {
        receipt.reason = errc_token(Errc::bad_tx_id);
        return receipt;
    }
    const Account* sender = find(tx.sender);
    if (!sender) {
        receipt.reason = errc_token(Errc::unknown_account);
        return receipt;
    }
    // Contract accounts have no keys; they never originate external
    // transactions. Refusing them here keeps the deposit's sole-caller rule
    // unforgeable.
    if (dispatcher_ && dispatcher_->handles(tx.sender)) {
        receipt.reason = errc_token(Errc::contract_sender);
        return receipt;
    }
    std::uint64_t pending = 0;
    if (auto it = pending_from_.find(tx.sender); it != pending_from_.end()) {
        pending = it->second;
    }
    if (tx.nonce != sender->nonce + pending + 1) {
        receipt.reason = errc_token(Errc::bad_nonce);
        return receipt;
    }
    if (tx.amount > sender->balance) {
        receipt.reason = errc_token(Errc::overdraw);
        return receipt;
    }
    pool_.push_back(tx);
    pending_from_[tx.sender] += 1;
    receipt.accepted = true;
    return receipt;
}

std::string Ledger::execute_tx(const Transaction& tx, std::uint64_t height) {
    Account* sender = find(tx.sender);
    if (!sender) return errc_token(Errc::unknown_account);
    if (tx.nonce != sender->nonce + 1) return errc_token(Errc::bad_nonce);
    sender->nonce += 1;  // inclusion consumes the nonce, success or not

    if (dispatcher_ && dispatcher_->handles(tx.recipient)) {
        return dispatcher_->execute(tx, height);
    }

    std::string reason;
    if (!account_exists(tx.recipient)) {
        reason = errc_token(Errc::unknown_recipient);
    } else if (sender->balance < tx.amount) {
        reason = errc_token(Errc::overdraw);
    } else {
        sender->balance -= tx.amount;
        find(tx.recipient)->balance += tx.amount;
    }
    if (sink_) sink_->emit(transfer_record(tx, height, reason.empty(), reason));
    return reason;
}

const Block& Ledger::seal_block() {
    sealing_ = true;
    std::uint64_t height = static_cast<std::uint64_t>(blocks_.size());
    Block b;
    b.index = height;
    b.prev_hash = blocks_.back().block_hash;
    for (const auto& tx : pool_) {
        std::string reason = execute_tx(tx, height);
        b.txs.push_back(SealedTx{tx, reason.empty() ? TxStatus::ok : TxStatus::failed,
                                 std::move(reason)});
    }
    pool_.clear();
    pending_from_.clear();
    b.block_hash = b.compute_hash();
    blocks_.push_back(std::move(b));
    sealing_ = false;
    return blocks_.back();
}

Status Ledger::transfer_in_seal(const Address& from, const Address& to, Amount amount) {
    if (!sealing_) {
        return make_error(Errc::invalid_argument, "transfer outside block sealing");
    }
    Account* src = find(from);
    Account* dst = find(to);
    if (!src || !dst) {
        return make_error(Errc::unknown_account, "transfer party unknown");
    }
    if (src->balance < amount) {
        return make_error(Errc::overdraw, "insufficient balance");
    }
    src->balance -= amount;
    dst->balance += amount;
    return Status::success();
}

Result<Address> Ledger::create_account_in_seal(std::string_view seed) {
    if (!sealing_) {
        return make_error(Errc::invalid_argument, "account creation outside block sealing");
    }
    return create_account(seed);
}

ValidationReport validate_blocks(std::span<const Block> blocks) {
    ValidationReport report;
    if (blocks.empty()) {
        report.valid = false;
        report.reason = "empty chain";
        return report;
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        auto fail = [&](std::string reason) {
            report.valid = false;
            report.first_bad_height = static_cast<std::uint64_t>(i);
            report.reason = std::move(reason);
            return report;
        };
        if (b.index != i) return fail("index mismatch");
        if (i == 0) {
            if (!std::all_of(b.prev_hash.begin(), b.prev_hash.end(),
                             [](std::uint8_t x) { return x == 0; })) {
                return fail("genesis prev_hash not zero");
            }
        } else if (b.prev_hash != blocks[i - 1].block_hash) {
            return fail("prev_hash link broken");
        }
        for (const auto& s : b.txs) {
            if (s.tx.tx_id != s.tx.compute_id()) return fail("tx_id mismatch");
        }
        if (b.block_hash != b.compute_hash()) return fail("block hash mismatch");
    }
    return report;
}

ValidationReport Ledger::validate_chain() const {
    return validate_blocks(blocks_);
}

// --- tamper support ---------------------------------------------------------
//
// Value-byte layout per block, in order:
//   index (8) | prev_hash (32) | per tx: sender 20, recipient 20, amount 8,
//   payload len, nonce 8, tx_id 32, status 1, reason len | block_hash (32)

namespace {

struct ByteRef {
    enum class Target { index, prev, sender, recipient, amount, payload, nonce, txid, status,
                        reason, hash };
    Target target;
    std::size_t tx = 0;
    std::size_t off = 0;
};

std::vector<ByteRef> value_byte_map(const Block& b) {
    std::vector<ByteRef> map;
    using T = ByteRef::Target;
    auto add = [&](T t, std::size_t tx, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) map.push_back(ByteRef{t, tx, i});
    };
    add(T::index, 0, 8);
    add(T::prev, 0, 32);
    for (std::size_t t = 0; t < b.txs.size(); ++t) {
        add(T::sender, t, 20);
        add(T::recipient, t, 20);
        add(T::amount, t, 8);
        add(T::payload, t, b.txs[t].tx.payload.size());
        add(T::nonce, t, 8);
        add(T::txid, t, 32);
        add(T::status, t, 1);
        add(T::reason, t, b.txs[t].reason.size());
    }
    add(T::hash, 0, 32);
    return map;
}

void xor_u64_byte(std::uint64_t& value, std::size_t be_index, std::uint8_t mask) {
    int shift = static_cast<int>((7 - be_index) * 8);
    value ^= static_cast<std::uint64_t>(mask) << shift;
}

}  // namespace

std::size_t Ledger::block_value_byte_count(std::uint64_t height) const {
    if (height >= blocks_.size()) return 0;
    return value_byte_map(blocks_[height]).size();
}

Status Ledger::tamper_block(std::uint64_t height, std::size_t offset, std::uint8_t xor_mask) {
    if (height >= blocks_.size()) {
        return make_error(Errc::invalid_argument, "no block at that height");
    }
    if (xor_mask == 0) {
        return make_error(Errc::invalid_argument, "xor mask must be nonzero");
    }
    Block& b = blocks_[height];
    auto map = value_byte_map(b);
    if (offset >= map.size()) {
        return make_error(Errc::invalid_argument, "offset past block data");
    }
    const ByteRef& ref = map[offset];
    using T = ByteRef::Target;
    switch (ref.target) {
        case T::index: xor_u64_byte(b.index, ref.off, xor_mask); break;
        case T::prev: b.prev_hash[ref.off] ^= xor_mask; break;
        case T::sender: b.txs[ref.tx].tx.sender.bytes[ref.off] ^= xor_mask; break;
        case T::recipient: b.txs[ref.tx].tx.recipient.bytes[ref.off] ^= xor_mask; break;
        case T::amount: xor_u64_byte(b.txs[ref.tx].tx.amount, ref.off, xor_mask); break;
        case T::payload: b.txs[ref.tx].tx.payload[ref.off] ^= static_cast<char>(xor_mask); break;
        case T::nonce: xor_u64_byte(b.txs[ref.tx].tx.nonce, ref.off, xor_mask); break;
        case T::txid: b.txs[ref.tx].tx.tx_id[ref.off] ^= xor_mask; break;
        case T::status:
            b.txs[ref.tx].status = static_cast<TxStatus>(
                static_cast<std::uint8_t>(b.txs[ref.tx].status) ^ xor_mask);
            break;
        case T::reason: b.txs[ref.tx].reason[ref.off] ^= static_cast<char>(xor_mask); break;
        case T::hash: b.block_hash[ref.off] ^= xor_mask; break;
    }
    return Status::success();
}

// --- chain text format ------------------------------------------------------

std::string chain_to_text(std::span<const Block> blocks) {
    std::ostringstream os;
    os << "deschain 1\n";
    for (const Block& b : blocks) {
        os << b.index << ' ' << digest_hex(b.prev_hash) << ' ' << b.txs.size();
        for (const SealedTx& s : b.txs) {
            os << ' ' << s.tx.sender.hex() << ' ' << s.tx.recipient.hex() << ' ' << s.tx.amount
               << ' ' << trace::pct_encode(s.tx.payload) << ' ' << s.tx.nonce << ' '
               << digest_hex(s.tx.tx_id) << ' '
               << (s.status == TxStatus::ok ? "ok" : "failed") << ' '
               << trace::pct_encode(s.reason);
        }
        os << ' ' << digest_hex(b.block_hash) << '\n';
    }
    return os.str();
}

Result<std::vector<Block>> chain_from_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != "deschain 1") {
        return make_error(Errc::parse_error, "missing deschain 1 header");
    }
    std::vector<Block> blocks;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls{line};
        auto fail = [&](const std::string& what) {
            return make_error(Errc::parse_error,
                              "chain line " + std::to_string(lineno) + ": " + what);
        };
        Block b;
        std::string prev_hex;
        std::size_t ntx = 0;
        if (!(ls >> b.index >> prev_hex >> ntx)) return fail("bad block header");
        auto prev = digest_from_hex(prev_hex);
        if (!prev) return fail("bad prev hash");
        b.prev_hash = prev.value();
        for (std::size_t i = 0; i < ntx; ++i) {
            std::string sender, recipient, payload, txid, status, reason;
            SealedTx s;
            if (!(ls >> sender >> recipient >> s.tx.amount >> payload >> s.tx.nonce >> txid >>
                  status >> reason)) {
                return fail("truncated transaction");
            }
            auto snd = Address::parse_hex(sender);
            auto rcp = Address::parse_hex(recipient);
            if (!snd || !rcp) return fail("bad transaction address");
            s.tx.sender = *snd;
            s.tx.recipient = *rcp;
            auto pl = trace::pct_decode(payload);
            if (!pl) return fail("bad payload encoding");
            s.tx.payload = pl.value();
            auto id = digest_from_hex(txid);
            if (!id) return fail("bad tx id");
            s.tx.tx_id = id.value();
            if (status == "ok") {
                s.status = TxStatus::ok;
            } else if (status == "failed") {
                s.status = TxStatus::failed;
            } else {
                return fail("bad status token");
            }
            auto rs = trace::pct_decode(reason);
            if (!rs) return fail("bad reason encoding");
            s.reason = rs.value();
            b.txs.push_back(std::move(s));
        }
        std::string hash_hex;
        if (!(ls >> hash_hex)) return fail("missing block hash");
        auto h = digest_from_hex(hash_hex);
        if (!h) return fail("bad block hash");
        b.block_hash = h.value();
        std::string extra;
        if (ls >> extra) return fail("trailing tokens");
        blocks.push_back(std::move(b));
    }
    return blocks;
}

}  // namespace des::ledger
