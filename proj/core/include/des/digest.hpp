#ifndef DES_DIGEST_HPP
#define DES_DIGEST_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "des/result.hpp"

namespace des {

// The one digest function of the whole system: SHA-256. Addresses, transaction
// ids, block hashes, identification codes and certification codes are all
// SHA-256 outputs (addresses truncated, see address.hpp).
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);
Result<std::vector<std::uint8_t>> from_hex(std::string_view hex);

std::string digest_hex(const Digest& d);
Result<Digest> digest_from_hex(std::string_view hex);

// Canonical field framing for everything that gets hashed: each field is
// emitted as a 4-byte big-endian length followed by the field bytes, in
// declared field order. Integers are 8-byte big-endian fields.
class HashWriter {
public:
    void field(std::span<const std::uint8_t> bytes);
    void field(std::string_view bytes);
    void field_u64(std::uint64_t value);
    void field_u8(std::uint8_t value);

    const std::vector<std::uint8_t>& bytes() const { return buf_; }
    Digest digest() const;

private:
    std::vector<std::uint8_t> buf_;
};

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t value);
std::uint64_t read_u64_be(std::span<const std::uint8_t, 8> in);

}  // namespace des

#endif
