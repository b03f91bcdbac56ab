#pragma once

#include "uidforge/card_ledger.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace uidforge {

enum class Command : std::uint8_t { Project, Demand, Coverage, Estimate };

std::string_view to_string(Command command) noexcept;

struct RunConfig {
    Command command = Command::Project;
    int horizon = 0;
    std::uint64_t seed = 0;
    IssuancePolicy issuance_policy = IssuancePolicy::AtBirth;
    /// Input role (population, survival, fertility, flows, ...) to path.
    std::map<std::string, std::filesystem::path> inputs;
    std::filesystem::path output;
};

/// Inputs each command cannot run without.
std::vector<std::string> required_inputs(Command command);

/// Throws DomainError on a negative horizon, an empty output path or a
/// missing required input.
void validate(const RunConfig &config);

/// `key=value` lines; blank lines and lines starting with '#' are skipped.
/// Keys may be written with or without leading dashes. Throws ParseError.
std::map<std::string, std::string> load_key_value_file(const std::filesystem::path &path);

inline constexpr const char *kSeedEnvVar = "UIDFORGE_SEED";

/// Seed from the flag if given, else from UIDFORGE_SEED. Throws DomainError
/// when neither is set or the variable does not hold an unsigned integer.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

} // namespace uidforge
