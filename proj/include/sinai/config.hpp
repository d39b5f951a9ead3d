#ifndef SINAI_CONFIG_HPP
#define SINAI_CONFIG_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "sinai/experiments.hpp"

namespace sinai {

struct Diagnostic {
    std::string path;  // JSON pointer-ish location
    std::string message;
};

struct ResolvedConfig {
    RunConfig run;
    nlohmann::json resolved;  // defaults applied; the hashed document
    std::string hash;
};

// Read a config file; parse errors are reported with line:column anchors.
nlohmann::json parse_config_file(const std::string& path);

// Built-in defaults per experiment; the acceptance-grade parameters.
nlohmann::json default_config(const std::string& experiment);

// Apply one "dotted.key=value" override; value is parsed as JSON when
// possible, else taken as a string.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

// Full validation without execution.
std::vector<Diagnostic> validate_config(const nlohmann::json& cfg);

// Defaults + validation + strong typing; throws ConfigError listing the
// diagnostics when invalid.
ResolvedConfig resolve_config(const nlohmann::json& cfg);

// Stable digest (FNV-1a 64) of the canonical dump.
std::string config_hash(const nlohmann::json& canonical);

}  // namespace sinai

#endif
