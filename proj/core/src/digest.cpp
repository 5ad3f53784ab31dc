#include "des/digest.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace des {

const char* errc_token(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::unknown_account: return "unknown_account";
        case Errc::duplicate_account: return "duplicate_account";
        case Errc::contract_sender: return "contract_sender";
        case Errc::bad_nonce: return "bad_nonce";
        case Errc::overdraw: return "overdraw";
        case Errc::unknown_recipient: return "unknown_recipient";
        case Errc::bad_tx_id: return "bad_tx_id";
        case Errc::unknown_contract: return "unknown_contract";
        case Errc::unauthorized: return "unauthorized";
        case Errc::bad_deposit: return "bad_deposit";
        case Errc::bad_call: return "bad_call";
        case Errc::closed: return "closed";
        case Errc::bad_code: return "bad_code";
        case Errc::duplicate_hire: return "duplicate_hire";
        case Errc::capacity: return "capacity";
        case Errc::not_hired: return "not_hired";
        case Errc::overrun: return "overrun";
        case Errc::sole_caller: return "sole_caller";
        case Errc::double_pay: return "double_pay";
        case Errc::escrow_underflow: return "escrow_underflow";
        case Errc::shape_mismatch: return "shape_mismatch";
        case Errc::not_enabled: return "not_enabled";
        case Errc::bounded_out: return "bounded_out";
        case Errc::parse_error: return "parse_error";
        case Errc::io_error: return "io_error";
    }
    return "unknown";
}

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

Digest sha256(std::string_view data) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

static const char kHexDigits[] = "0123456789abcdef";

std::string to_hex(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Result<std::vector<std::uint8_t>> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        return make_error(Errc::parse_error, "odd hex length");
    }
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            return make_error(Errc::parse_error, "bad hex digit");
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string digest_hex(const Digest& d) {
    return to_hex(d);
}

Result<Digest> digest_from_hex(std::string_view hex) {
    auto bytes = from_hex(hex);
    if (!bytes) return bytes.error();
    if (bytes.value().size() != 32) {
        return make_error(Errc::parse_error, "digest must be 32 bytes");
    }
    Digest d{};
    std::memcpy(d.data(), bytes.value().data(), 32);
    return d;
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t value) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(value >> shift));
    }
}

std::uint64_t read_u64_be(std::span<const std::uint8_t, 8> in) {
    std::uint64_t v = 0;
    for (std::uint8_t b : in) v = (v << 8) | b;
    return v;
}

void HashWriter::field(std::span<const std::uint8_t> bytes) {
    std::uint32_t len = static_cast<std::uint32_t>(bytes.size());
    for (int shift = 24; shift >= 0; shift -= 8) {
        buf_.push_back(static_cast<std::uint8_t>(len >> shift));
    }
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void HashWriter::field(std::string_view bytes) {
    field(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

void HashWriter::field_u64(std::uint64_t value) {
    std::vector<std::uint8_t> tmp;
    tmp.reserve(8);
    put_u64_be(tmp, value);
    field(std::span<const std::uint8_t>(tmp.data(), tmp.size()));
}

void HashWriter::field_u8(std::uint8_t value) {
    field(std::span<const std::uint8_t>(&value, 1));
}

Digest HashWriter::digest() const {
    return sha256(std::span<const std::uint8_t>(buf_.data(), buf_.size()));
}

}  // namespace des
