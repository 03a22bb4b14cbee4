#pragma once

// Config-driven workflows behind the command-line tool.
//
// Config format: '#' starts a comment, "[name]" opens a section, other lines
// are "key = value". Keys outside any section belong to [session].

#include "quantact/dga.hpp"
#include "quantact/numfio.hpp"
#include "quantact/report.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace quantact {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigValue {
    std::string value;
    std::size_t line = 0;
};

class Config {
public:
    static Config parse(const std::string& text, const std::string& base_dir = ".");
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key, const std::string& fallback = {}) const;
    std::string require(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    /// Keys of a section starting with prefix (e.g. "phase."), in file order.
    std::vector<std::pair<std::string, ConfigValue>> with_prefix(const std::string& section,
                                                                 const std::string& prefix) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    /// Path relative to the config file's directory.
    std::string resolve(const std::string& path) const;
    /// Throws ConfigError naming the first key not in the allowed set (entries ending in '.' are prefixes).
    void check_keys(const std::map<std::string, std::vector<std::string>>& allowed) const;

private:
    [[noreturn]] void fail(const ConfigValue& v, const std::string& msg) const;
    const ConfigValue* find(const std::string& section, const std::string& key) const;

    std::string base_dir_ = ".";
    std::map<std::string, std::vector<std::pair<std::string, ConfigValue>>> sections_;
};

struct SessionConfig {
    std::string action;  // "builtin:<spec>" or path to an action file
    std::string task;
    int order = 2;
    std::uint64_t seed = 0x5eedULL;
    std::string out;  // report directory; empty means stdout only
    Config raw;

    static SessionConfig from(const Config& c);
};

const std::vector<std::string>& task_names();

struct TaskResult {
    Report report;
    std::map<std::string, std::string> artifacts;  // file name -> contents
};

/// Runs one task; the report's pass state decides the exit status.
TaskResult run_task(const SessionConfig& cfg);
/// Runs and writes the report plus artifacts under cfg.out; returns 0 iff every check passed.
int run_session(const SessionConfig& cfg, std::ostream& log);

Action load_session_action(const SessionConfig& cfg);

}  // namespace quantact
