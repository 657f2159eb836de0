#include "rankfolio/report.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rankfolio/config.h"

namespace rankfolio {

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64_hex(ss.str());
}

RunManifest make_manifest(const std::string& command, const std::string& strategy,
                          const std::filesystem::path& data_path, const BacktestConfig& cfg) {
    RunManifest m;
    m.command = command;
    m.strategy = strategy;
    m.data_path = data_path.string();
    m.data_hash = hash_file(data_path);
    m.config = config_entries(cfg);
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.timestamp = buf;
    return m;
}

std::string format_manifest(const RunManifest& m) {
    std::string out = "# rankfolio run manifest\n";
    out += "version = " + m.version + "\n";
    out += "timestamp = " + m.timestamp + "\n";
    out += "command = " + m.command + "\n";
    out += "strategy = " + m.strategy + "\n";
    out += "data = " + m.data_path + "\n";
    out += "data_fnv1a64 = " + m.data_hash + "\n";
    out += "[config]\n";
    for (const auto& [k, v] : m.config) out += k + " = " + v + "\n";
    return out;
}

std::string format_metrics_csv(const std::string& key_column, const std::vector<MetricsRow>& rows, bool printed) {
    std::string out = key_column;
    for (const auto& c : metrics_columns()) out += "," + c;
    out += "\n";
    for (const auto& r : rows) {
        out += r.label;
        for (const auto& cell : printed ? metrics_printed_cells(r.metrics) : metrics_raw_cells(r.metrics)) {
            out += "," + cell;
        }
        out += "\n";
    }
    return out;
}

std::string format_metrics_text(const std::string& key_column, const std::vector<MetricsRow>& rows) {
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header{key_column};
    header.insert(header.end(), metrics_columns().begin(), metrics_columns().end());
    table.push_back(header);
    for (const auto& r : rows) {
        std::vector<std::string> line{r.label};
        const auto cells = metrics_printed_cells(r.metrics);
        line.insert(line.end(), cells.begin(), cells.end());
        table.push_back(line);
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : table) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::string out;
    for (const auto& line : table) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            const std::string pad(width[c] - line[c].size(), ' ');
            if (c == 0) {
                out += line[c] + pad;
            } else {
                out += "  " + pad + line[c];
            }
        }
        out += "\n";
    }
    return out;
}

std::vector<std::string> expand_strategy_list(const std::vector<std::string>& items, const BacktestConfig& cfg) {
    std::vector<std::string> out;
    auto add = [&out](const std::string& s) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    for (const auto& item : items) {
        if (item == "all") {
            for (const auto& n : classic_strategy_names()) add(n);
            add(canonical_strategy_id("mlp", cfg));
            add(canonical_strategy_id("knn", cfg));
        } else if (item == "all-ml") {
            for (const char* kind : {"mlp", "knn"}) {
                for (const char* t : {"return", "1", "2", "3", "4"}) add(std::string(kind) + ":" + t);
            }
        } else {
            add(canonical_strategy_id(item, cfg));
        }
    }
    return out;
}

std::vector<ComparisonRow> run_comparison(const PriceMatrix& prices, const std::vector<std::string>& strategies,
                                          const BacktestConfig& cfg) {
    std::vector<double> bench;
    const std::vector<double>* bench_ptr = nullptr;
    static const std::vector<double> kNone;
    if (!cfg.benchmark.empty()) {
        bench = run_backtest(prices, cfg.benchmark, cfg, &kNone).net_returns();
        bench_ptr = &bench;
    }
    const std::string bench_id = cfg.benchmark.empty() ? "" : canonical_strategy_id(cfg.benchmark, cfg);

    std::vector<ComparisonRow> rows(strategies.size());
    const auto count = static_cast<std::ptrdiff_t>(strategies.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        row.strategy = strategies[static_cast<std::size_t>(i)];
        try {
            row.strategy = canonical_strategy_id(row.strategy, cfg);
            const bool is_bench = row.strategy == bench_id;
            row.result = run_backtest(prices, row.strategy, cfg, is_bench ? &kNone : bench_ptr);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ComparisonRow& a, const ComparisonRow& b) { return a.strategy < b.strategy; });
    return rows;
}

std::vector<FeeRow> run_fee_sweep(const PriceMatrix& prices, const std::string& strategy, std::vector<double> fees,
                                  const BacktestConfig& cfg) {
    for (double f : fees) {
        if (!(f >= 0.0)) throw std::invalid_argument("fee must be non-negative, got " + format_fee(f));
    }
    std::sort(fees.begin(), fees.end());
    fees.erase(std::unique(fees.begin(), fees.end()), fees.end());
    std::vector<std::optional<FeeRow>> slots(fees.size());
    std::vector<std::string> errors(fees.size());
    const auto count = static_cast<std::ptrdiff_t>(fees.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            BacktestConfig c = cfg;
            c.fee = fees[u];
            slots[u] = FeeRow{fees[u], run_backtest(prices, strategy, c)};
        } catch (const std::exception& e) {
            errors[u] = e.what();
        }
    }
    std::vector<FeeRow> out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i]) throw std::runtime_error("fee " + format_fee(fees[i]) + ": " + errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

std::string format_fee(double fee) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", fee);
    return buf;
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string f4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string format_normalized_prices_csv(const PriceMatrix& prices) {
    std::string out = "date";
    for (const auto& a : prices.symbols()) out += "," + a;
    out += "\n";
    for (std::size_t i = 0; i < prices.days(); ++i) {
        out += prices.dates()[i].to_string();
        for (std::size_t j = 0; j < prices.assets(); ++j) out += "," + g17(prices.price(i, j) / prices.price(0, j));
        out += "\n";
    }
    return out;
}

std::string format_wealth_plot_csv(const BacktestResult& result) {
    std::string out = "date,strategy_wealth,benchmark_wealth,cumulative_excess\n";
    const auto net = result.net_returns();
    const bool has_bench = result.benchmark_net.size() == net.size();
    const auto bench_wealth = has_bench ? wealth_curve(result.benchmark_net) : wealth_curve(net);
    double excess = 0.0;
    for (std::size_t i = 0; i < result.days.size(); ++i) {
        const double b = has_bench ? result.benchmark_net[i] : net[i];
        excess += net[i] - b;
        out += result.days[i].date.to_string() + "," + g17(result.days[i].wealth) + "," + g17(bench_wealth[i]) + "," +
               g17(excess) + "\n";
    }
    return out;
}

std::string format_summary_stats_csv(const std::vector<ReturnStats>& stats) {
    std::string out = "statistic";
    for (const auto& s : stats) out += "," + s.asset;
    out += "\n";
    auto line = [&](const std::string& name, auto get) {
        out += name;
        for (const auto& s : stats) out += "," + get(s);
        out += "\n";
    };
    line("count", [](const ReturnStats& s) { return std::to_string(s.count); });
    line("mean", [](const ReturnStats& s) { return g17(s.mean); });
    line("std", [](const ReturnStats& s) { return g17(s.std); });
    line("min", [](const ReturnStats& s) { return g17(s.min); });
    line("25%", [](const ReturnStats& s) { return g17(s.q25); });
    line("50%", [](const ReturnStats& s) { return g17(s.median); });
    line("75%", [](const ReturnStats& s) { return g17(s.q75); });
    line("max", [](const ReturnStats& s) { return g17(s.max); });
    return out;
}

std::string format_summary_stats_text(const std::vector<ReturnStats>& stats) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"statistic"};
    for (const auto& s : stats) header.push_back(s.asset);
    rows.push_back(header);
    auto add = [&](const std::string& name, auto get) {
        std::vector<std::string> r{name};
        for (const auto& s : stats) r.push_back(get(s));
        rows.push_back(r);
    };
    add("count", [](const ReturnStats& s) { return std::to_string(s.count); });
    add("mean", [](const ReturnStats& s) { return f4(s.mean); });
    add("std", [](const ReturnStats& s) { return f4(s.std); });
    add("min", [](const ReturnStats& s) { return f4(s.min); });
    add("25%", [](const ReturnStats& s) { return f4(s.q25); });
    add("50%", [](const ReturnStats& s) { return f4(s.median); });
    add("75%", [](const ReturnStats& s) { return f4(s.q75); });
    add("max", [](const ReturnStats& s) { return f4(s.max); });
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            const std::string pad(width[c] - r[c].size(), ' ');
            out += c == 0 ? r[c] + pad : "  " + pad + r[c];
        }
        out += "\n";
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace rankfolio
