#include "sdd_tools/config.hpp"
#include "sdd/csv.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <sstream>

namespace sdd::tools {

void config_fail(const std::string& what) {
    throw Error(ErrorCode::config_error, what);
}

namespace {

Config from_ptree(const boost::property_tree::ptree& tree) {
    Config cfg;
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) config_fail("key '" + section + "' outside any section");
        for (const auto& [key, value] : body) {
            if (!value.empty()) config_fail("nested key under [" + section + "] " + key);
            cfg.set(section, key, value.data());
        }
    }
    return cfg;
}

} // namespace

Config Config::from_file(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        config_fail(e.what());
    }
    return from_ptree(tree);
}

Config Config::from_string(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        config_fail(e.what());
    }
    return from_ptree(tree);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    values_[section][key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section);
    return it != values_.end() && it->second.count(key) > 0;
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) {
    consumed_.insert(section + "." + key);
    const auto it = values_.find(section);
    if (it == values_.end()) return std::nullopt;
    const auto kv = it->second.find(key);
    if (kv == it->second.end()) return std::nullopt;
    return kv->second;
}

void Config::record(const std::string& section, const std::string& key, const std::string& value) {
    resolved_[section][key] = value;
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) {
    const std::string v = raw(section, key).value_or(fallback);
    record(section, key, v);
    return v;
}

std::optional<std::string> Config::maybe_text(const std::string& section, const std::string& key) {
    auto v = raw(section, key);
    if (v) record(section, key, *v);
    return v;
}

double Config::number(const std::string& section, const std::string& key, double fallback) {
    const auto v = raw(section, key);
    double x = fallback;
    if (v) {
        try {
            x = parse_double(*v);
        } catch (const Error&) {
            config_fail("[" + section + "] " + key + ": expected a number, got '" + *v + "'");
        }
    }
    record(section, key, format_double(x));
    return x;
}

std::uint64_t Config::count(const std::string& section, const std::string& key, std::uint64_t fallback) {
    const auto v = raw(section, key);
    std::uint64_t n = fallback;
    if (v) {
        double x = 0.0;
        try {
            x = parse_double(*v);
        } catch (const Error&) {
            config_fail("[" + section + "] " + key + ": expected a count, got '" + *v + "'");
        }
        if (!(x >= 0.0) || x != std::floor(x) || x > 1.8e19) {
            config_fail("[" + section + "] " + key + ": expected a nonnegative integer, got '" + *v + "'");
        }
        n = static_cast<std::uint64_t>(x);
    }
    record(section, key, std::to_string(n));
    return n;
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) {
    const auto v = raw(section, key);
    bool b = fallback;
    if (v) {
        if (*v == "true" || *v == "1" || *v == "yes") {
            b = true;
        } else if (*v == "false" || *v == "0" || *v == "no") {
            b = false;
        } else {
            config_fail("[" + section + "] " + key + ": expected true or false, got '" + *v + "'");
        }
    }
    record(section, key, b ? "true" : "false");
    return b;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) {
    const auto v = raw(section, key);
    std::vector<double> out = fallback;
    if (v) {
        out.clear();
        std::string item;
        std::istringstream in(*v);
        while (std::getline(in, item, ',')) {
            if (item.find_first_not_of(" \t") == std::string::npos) continue;
            try {
                out.push_back(parse_double(item));
            } catch (const Error&) {
                config_fail("[" + section + "] " + key + ": bad list item '" + item + "'");
            }
        }
    }
    std::string echo;
    for (double x : out) echo += (echo.empty() ? "" : ", ") + format_double(x);
    record(section, key, echo);
    return out;
}

void Config::reject_unknown() const {
    std::string unknown;
    for (const auto& [section, body] : values_) {
        for (const auto& [key, value] : body) {
            if (!consumed_.count(section + "." + key)) unknown += (unknown.empty() ? "" : ", ") + section + "." + key;
        }
    }
    if (!unknown.empty()) config_fail("unknown keys: " + unknown);
}

} // namespace sdd::tools
