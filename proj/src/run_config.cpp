#include "uidforge/run_config.hpp"

#include "uidforge/errors.hpp"

#include <charconv>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>

namespace uidforge {

namespace {

std::string trimmed(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

std::string_view to_string(Command command) noexcept {
    switch (command) {
    case Command::Project:
        return "project";
    case Command::Demand:
        return "demand";
    case Command::Coverage:
        return "coverage";
    case Command::Estimate:
        return "estimate";
    }
    return "unknown";
}

std::vector<std::string> required_inputs(Command command) {
    switch (command) {
    case Command::Project:
        return {"population", "survival", "fertility"};
    case Command::Demand:
        return {"population", "survival", "fertility", "flows"};
    case Command::Coverage:
        return {"population"};
    case Command::Estimate:
        return {"observations"};
    }
    return {};
}

void validate(const RunConfig &config) {
    if (config.horizon < 0) {
        throw DomainError(fmt::format("horizon must be >= 0, got {}", config.horizon));
    }
    if (config.output.empty()) {
        throw DomainError(fmt::format("{}: output path is required", to_string(config.command)));
    }
    for (const auto &role : required_inputs(config.command)) {
        auto it = config.inputs.find(role);
        if (it == config.inputs.end() || it->second.empty()) {
            throw DomainError(
                fmt::format("{}: --{} path is required", to_string(config.command), role));
        }
    }
}

std::map<std::string, std::string> load_key_value_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("{}: cannot open for reading", path.string()));
    }
    std::map<std::string, std::string> values;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trimmed(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string(), number, fmt::format("expected key=value, got '{}'", text));
        }
        auto key = trimmed(std::string_view(text).substr(0, eq));
        key.erase(0, key.find_first_not_of('-'));
        if (key.empty()) {
            throw ParseError(path.string(), number, "empty key");
        }
        values[key] = trimmed(std::string_view(text).substr(eq + 1));
    }
    return values;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) {
        return *flag;
    }
    const char *env = std::getenv(kSeedEnvVar);
    if (env == nullptr || *env == '\0') {
        throw DomainError(fmt::format("no seed given: pass --seed or set {}", kSeedEnvVar));
    }
    const std::string_view text{env};
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DomainError(fmt::format("{}='{}' is not an unsigned integer", kSeedEnvVar, text));
    }
    return seed;
}

} // namespace uidforge
