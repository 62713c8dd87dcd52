#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace regchrom {

/// A subcommand parameter as published in the schema; `key` is both the flag
/// name (--key) and the config-file key.
struct ParamSpec {
    std::string key;
    std::string default_value;  // empty: required unless optional
    std::string help;
    bool optional = false;
};

/// Subcommand names in help order.
const std::vector<std::string>& subcommands();
/// Parameters of a subcommand (InputError for unknown names).
const std::vector<ParamSpec>& schema(const std::string& subcommand);

struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;             // empty: standard output
    std::string format = "json"; // json | csv (| graph for sample)
};

/// Flat "key = value" text, '#' starts a comment. Duplicate keys are rejected.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies defaults, then the config entries, then the flag entries, and
/// validates the result against the schema (InputError on unknown keys or
/// missing required parameters).
RunConfig resolve_config(const std::string& subcommand, const std::map<std::string, std::string>& config_file,
                         const std::map<std::string, std::string>& flags, const std::string& env_seed = "");

/// Runs the subcommand and returns the rendered artifact.
std::string render(const RunConfig& config);

/// Runs the subcommand, writing to config.out atomically or to `out`.
/// Returns the process exit status; errors are reported on `err` as JSON
/// {"code", "message"}: 0 ok, 1 internal or failed verification, 2 invalid
/// input, 3 guard refusal.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Command-line entry point (flag parsing, --config, REGCHROM_SEED, --version).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Text written by --version.
std::string version_string();

/// RFC 4180 field quoting.
std::string csv_field(const std::string& value);

}  // namespace regchrom
