#ifndef DES_RESULT_HPP
#define DES_RESULT_HPP

#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace des {

enum class Errc {
    invalid_argument,
    unknown_account,
    duplicate_account,
    contract_sender,
    bad_nonce,
    overdraw,
    unknown_recipient,
    bad_tx_id,
    unknown_contract,
    unauthorized,
    bad_deposit,
    bad_call,
    closed,
    bad_code,
    duplicate_hire,
    capacity,
    not_hired,
    overrun,
    sole_caller,
    double_pay,
    escrow_underflow,
    shape_mismatch,
    not_enabled,
    bounded_out,
    parse_error,
    io_error,
};

// Short stable token, used as the failure reason recorded in sealed blocks
// and in report files.
const char* errc_token(Errc code);

struct Error {
    Errc code = Errc::invalid_argument;
    std::string message;
};

inline Error make_error(Errc code, std::string message) {
    return Error{code, std::move(message)};
}

template <typename T>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Error error) : v_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(v_); }
    T& value() & { return std::get<T>(v_); }
    T&& value() && { return std::get<T>(std::move(v_)); }
    const Error& error() const { return std::get<Error>(v_); }

private:
    std::variant<T, Error> v_;
};

class Status {
public:
    Status() = default;
    Status(Error error) : err_(std::move(error)) {}

    bool ok() const { return !err_.has_value(); }
    explicit operator bool() const { return ok(); }
    const Error& error() const { return *err_; }

    static Status success() { return Status(); }

private:
    std::optional<Error> err_;
};

}  // namespace des

#endif
