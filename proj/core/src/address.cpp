#include "des/address.hpp"

#include <algorithm>
#include <cstring>

#include "des/digest.hpp"

namespace des {

Address Address::from_seed(std::string_view seed) {
    Digest d = sha256(seed);
    Address a;
    std::memcpy(a.bytes.data(), d.data(), a.bytes.size());
    return a;
}

std::optional<Address> Address::parse_hex(std::string_view hex) {
    if (hex.size() != 40) return std::nullopt;
    auto raw = from_hex(hex);
    if (!raw) return std::nullopt;
    Address a;
    std::memcpy(a.bytes.data(), raw.value().data(), a.bytes.size());
    return a;
}

std::string Address::hex() const {
    return to_hex(bytes);
}

bool Address::is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace des
