#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pfs {

enum class Errc {
    invalid_input,
    encoding,
    parse,
    local_verification_failed,
    stale_timestamp,
    auth_mismatch,
    malformed_hex,
    truncated,
    version_mismatch,
    attack_step,
    config,
    io,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure in the library surfaces as an Error carrying a machine-checkable code.
/// Protocol aborts use the same type; the harness turns them into session outcomes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised by the adversary when one of the six derivation steps cannot proceed.
class AttackStepError : public Error {
public:
    AttackStepError(int step, const std::string& what);

    int step() const noexcept { return step_; }

private:
    int step_;
};

}  // namespace pfs
