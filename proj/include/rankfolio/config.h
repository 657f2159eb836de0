#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rankfolio/engine.h"

namespace rankfolio {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every recognised key of the flat `key = value` run configuration.
const std::vector<std::string>& config_keys();

// Throws ConfigError for unknown keys or values of the wrong type.
void set_config_value(BacktestConfig& cfg, const std::string& key, const std::string& value);

// Lines are `key = value`; blank lines and lines starting with '#' are
// ignored. Values are applied over `base`.
BacktestConfig parse_config(const std::string& text, BacktestConfig base = {});
BacktestConfig load_config(const std::filesystem::path& path, BacktestConfig base = {});

// Canonical echo of every key, in config_keys() order.
std::vector<std::pair<std::string, std::string>> config_entries(const BacktestConfig& cfg);
std::string format_config(const BacktestConfig& cfg);

}  // namespace rankfolio
