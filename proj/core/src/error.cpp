#include "pfs/error.hpp"

namespace pfs {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_input: return "invalid-input";
        case Errc::encoding: return "encoding";
        case Errc::parse: return "parse";
        case Errc::local_verification_failed: return "local-verification-failed";
        case Errc::stale_timestamp: return "stale-timestamp";
        case Errc::auth_mismatch: return "auth-mismatch";
        case Errc::malformed_hex: return "malformed-hex";
        case Errc::truncated: return "truncated";
        case Errc::version_mismatch: return "version-mismatch";
        case Errc::attack_step: return "attack-step";
        case Errc::config: return "config";
        case Errc::io: return "io";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

AttackStepError::AttackStepError(int step, const std::string& what)
    : Error(Errc::attack_step, "step " + std::to_string(step) + ": " + what), step_(step) {}

}  // namespace pfs
