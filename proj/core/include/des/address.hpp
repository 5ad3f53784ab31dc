#ifndef DES_ADDRESS_HPP
#define DES_ADDRESS_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace des {

// 20-byte account identifier: the first 20 bytes of sha256(seed).
// Printable form is fixed 40-char lowercase hex.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    static Address from_seed(std::string_view seed);
    static std::optional<Address> parse_hex(std::string_view hex);

    std::string hex() const;
    bool is_zero() const;

    auto operator<=>(const Address&) const = default;
};

// All-zero address: the mint sender of genesis funding transactions. It is
// never a real account and no seed hashes to it.
inline constexpr Address kMintAddress{};

}  // namespace des

#endif
