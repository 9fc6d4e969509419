#pragma once

#include "sdd/error.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sdd::tools {

// INI-style experiment configuration. Every value an experiment reads is
// recorded with its resolved value (defaults included) for the manifest;
// keys present in the file but never read are rejected by reject_unknown().
class Config {
public:
    using Section = std::map<std::string, std::string>;

    static Config from_file(const std::filesystem::path& path);
    static Config from_string(const std::string& text);

    void set(const std::string& section, const std::string& key, const std::string& value);
    bool has(const std::string& section, const std::string& key) const;

    std::string text(const std::string& section, const std::string& key, const std::string& fallback);
    std::optional<std::string> maybe_text(const std::string& section, const std::string& key);
    double number(const std::string& section, const std::string& key, double fallback);
    std::uint64_t count(const std::string& section, const std::string& key, std::uint64_t fallback);
    bool flag(const std::string& section, const std::string& key, bool fallback);
    std::vector<double> numbers(const std::string& section, const std::string& key, const std::vector<double>& fallback);

    void reject_unknown() const;

    const std::map<std::string, Section>& resolved() const { return resolved_; }

private:
    std::optional<std::string> raw(const std::string& section, const std::string& key);
    void record(const std::string& section, const std::string& key, const std::string& value);

    std::map<std::string, Section> values_;
    std::map<std::string, Section> resolved_;
    std::set<std::string> consumed_;
};

[[noreturn]] void config_fail(const std::string& what);

} // namespace sdd::tools
