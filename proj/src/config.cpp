#include "rankfolio/config.h"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rankfolio {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "' (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v, "a number");
    return d;
}

unsigned long long to_unsigned(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) bad_value(key, v, "a non-negative integer");
    errno = 0;
    const unsigned long long u = std::strtoull(v.c_str(), nullptr, 10);
    if (errno == ERANGE) bad_value(key, v, "a non-negative integer");
    return u;
}

std::size_t to_size(const std::string& key, const std::string& v) { return static_cast<std::size_t>(to_unsigned(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v, "true or false");
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(BacktestConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const BacktestConfig&)>;
struct Field {
    std::string key;
    Setter set;
    Getter get;
};

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> v;
        auto size_field = [&v](std::string key, std::size_t BacktestConfig::*m) {
            v.push_back({key, [m](BacktestConfig& c, const std::string& k, const std::string& x) { c.*m = to_size(k, x); },
                         [m](const BacktestConfig& c) { return std::to_string(c.*m); }});
        };
        auto double_field = [&v](std::string key, double BacktestConfig::*m) {
            v.push_back({key, [m](BacktestConfig& c, const std::string& k, const std::string& x) { c.*m = to_double(k, x); },
                         [m](const BacktestConfig& c) { return num(c.*m); }});
        };
        auto classic_size = [&v](std::string key, std::size_t ClassicParams::*m) {
            v.push_back({key,
                         [m](BacktestConfig& c, const std::string& k, const std::string& x) { c.classic.*m = to_size(k, x); },
                         [m](const BacktestConfig& c) { return std::to_string(c.classic.*m); }});
        };
        auto classic_double = [&v](std::string key, double ClassicParams::*m) {
            v.push_back({key,
                         [m](BacktestConfig& c, const std::string& k, const std::string& x) { c.classic.*m = to_double(k, x); },
                         [m](const BacktestConfig& c) { return num(c.classic.*m); }});
        };
        auto date_field = [&v](std::string key, std::optional<Date> BacktestConfig::*m) {
            v.push_back({key,
                         [m](BacktestConfig& c, const std::string& k, const std::string& x) {
                             if (x.empty()) {
                                 (c.*m).reset();
                                 return;
                             }
                             try {
                                 c.*m = Date::parse(x);
                             } catch (const std::invalid_argument&) {
                                 bad_value(k, x, "a YYYY-MM-DD date");
                             }
                         },
                         [m](const BacktestConfig& c) { return (c.*m) ? (c.*m)->to_string() : std::string(); }});
        };

        size_field("lookback", &BacktestConfig::lookback);
        size_field("refit", &BacktestConfig::refit_interval);
        double_field("decay_alpha", &BacktestConfig::decay_alpha);
        size_field("decay_len", &BacktestConfig::decay_length);
        v.push_back({"decay",
                     [](BacktestConfig& c, const std::string& k, const std::string& x) {
                         if (x == "auto") c.decay_mode = BacktestConfig::DecayMode::Auto;
                         else if (x == "on") c.decay_mode = BacktestConfig::DecayMode::On;
                         else if (x == "off") c.decay_mode = BacktestConfig::DecayMode::Off;
                         else bad_value(k, x, "auto, on or off");
                     },
                     [](const BacktestConfig& c) {
                         switch (c.decay_mode) {
                             case BacktestConfig::DecayMode::On: return std::string("on");
                             case BacktestConfig::DecayMode::Off: return std::string("off");
                             default: return std::string("auto");
                         }
                     }});
        double_field("fee", &BacktestConfig::fee);
        v.push_back({"rank_power",
                     [](BacktestConfig& c, const std::string& k, const std::string& x) {
                         try {
                             c.target = TargetSpec::parse(x);
                         } catch (const std::invalid_argument&) {
                             bad_value(k, x, "'return' or a positive integer");
                         }
                     },
                     [](const BacktestConfig& c) { return c.target.to_string(); }});
        v.push_back({"seed", [](BacktestConfig& c, const std::string& k, const std::string& x) { c.seed = to_unsigned(k, x); },
                     [](const BacktestConfig& c) { return std::to_string(c.seed); }});
        size_field("feature_window", &BacktestConfig::feature_window);
        v.push_back({"trend",
                     [](BacktestConfig& c, const std::string& k, const std::string& x) {
                         if (x == "price") c.trend = TrendMeasure::PriceSpearman;
                         else if (x == "return") c.trend = TrendMeasure::ReturnSpearman;
                         else bad_value(k, x, "price or return");
                     },
                     [](const BacktestConfig& c) {
                         return std::string(c.trend == TrendMeasure::PriceSpearman ? "price" : "return");
                     }});
        date_field("start", &BacktestConfig::start);
        date_field("end", &BacktestConfig::end);
        v.push_back({"epochs",
                     [](BacktestConfig& c, const std::string& k, const std::string& x) {
                         c.epochs = static_cast<int>(to_unsigned(k, x));
                     },
                     [](const BacktestConfig& c) { return std::to_string(c.epochs); }});
        double_field("learning_rate", &BacktestConfig::learning_rate);
        v.push_back({"hidden",
                     [](BacktestConfig& c, const std::string& k, const std::string& x) {
                         std::vector<std::size_t> sizes;
                         std::stringstream ss(x);
                         for (std::string part; std::getline(ss, part, ',');) {
                             const auto s = to_size(k, trim(part));
                             if (s == 0) bad_value(k, x, "comma-separated positive layer sizes");
                             sizes.push_back(s);
                         }
                         c.hidden = std::move(sizes);
                     },
                     [](const BacktestConfig& c) {
                         std::string out;
                         for (std::size_t i = 0; i < c.hidden.size(); ++i) out += (i ? "," : "") + std::to_string(c.hidden[i]);
                         return out;
                     }});
        size_field("knn_k", &BacktestConfig::knn_k);
        v.push_back({"benchmark",
                     [](BacktestConfig& c, const std::string&, const std::string& x) { c.benchmark = x; },
                     [](const BacktestConfig& c) { return c.benchmark; }});
        v.push_back({"periods_per_year",
                     [](BacktestConfig& c, const std::string& k, const std::string& x) {
                         c.metrics.periods_per_year = to_double(k, x);
                     },
                     [](const BacktestConfig& c) { return num(c.metrics.periods_per_year); }});
        v.push_back({"legacy_annualized_return",
                     [](BacktestConfig& c, const std::string& k, const std::string& x) {
                         c.metrics.legacy_sqrt_sum_return = to_bool(k, x);
                     },
                     [](const BacktestConfig& c) { return std::string(c.metrics.legacy_sqrt_sum_return ? "true" : "false"); }});
        classic_double("eg_eta", &ClassicParams::eg_eta);
        classic_size("anticor_window", &ClassicParams::anticor_window);
        classic_double("pamr_epsilon", &ClassicParams::pamr_epsilon);
        classic_double("cwmr_phi", &ClassicParams::cwmr_phi);
        classic_double("cwmr_epsilon", &ClassicParams::cwmr_epsilon);
        classic_size("olmar_window", &ClassicParams::olmar_window);
        classic_double("olmar_epsilon", &ClassicParams::olmar_epsilon);
        classic_size("rmr_window", &ClassicParams::rmr_window);
        classic_double("rmr_epsilon", &ClassicParams::rmr_epsilon);
        classic_size("bnn_k", &ClassicParams::bnn_neighbors);
        classic_size("bnn_window", &ClassicParams::bnn_window);
        classic_double("corn_rho", &ClassicParams::corn_rho);
        classic_size("corn_window", &ClassicParams::corn_window);
        classic_size("up_samples", &ClassicParams::up_samples);
        return v;
    }();
    return f;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

void set_config_value(BacktestConfig& cfg, const std::string& key, const std::string& value) {
    const auto& f = fields();
    const auto it = std::find_if(f.begin(), f.end(), [&](const Field& x) { return x.key == key; });
    if (it == f.end()) throw ConfigError("unknown key '" + key + "'");
    it->set(cfg, key, value);
}

BacktestConfig parse_config(const std::string& text, BacktestConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            set_config_value(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

BacktestConfig load_config(const std::filesystem::path& path, BacktestConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_entries(const BacktestConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
    return out;
}

std::string format_config(const BacktestConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : config_entries(cfg)) out += k + " = " + v + "\n";
    return out;
}

}  // namespace rankfolio
