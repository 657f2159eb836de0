#include "rankfolio/fetch.h"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

namespace rankfolio {

namespace {

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string format_price(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

FetchOptions FetchOptions::from_environment() {
    FetchOptions o;
    if (const char* base = std::getenv("RANKFOLIO_API_BASE"); base && *base) o.api_base = base;
    if (const char* key = std::getenv("RANKFOLIO_API_KEY"); key && *key) o.api_key = key;
    return o;
}

std::vector<DailyPrice> parse_market_chart(const std::string& body, const Date& start, const Date& end) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw FetchError(std::string("malformed payload: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("prices") || !doc["prices"].is_array()) {
        throw FetchError("payload has no 'prices' array");
    }
    const std::int64_t lo = start.to_days(), hi = end.to_days();
    std::vector<DailyPrice> out;
    for (const auto& item : doc["prices"]) {
        if (!item.is_array() || item.size() < 2 || !item[0].is_number() || !item[1].is_number()) {
            throw FetchError("malformed price entry");
        }
        const double ms = item[0].get<double>();
        const double price = item[1].get<double>();
        const auto day = static_cast<std::int64_t>(std::floor(ms / 86400000.0));
        if (day < lo || day > hi) continue;
        if (!(price > 0.0) || !std::isfinite(price)) throw FetchError("non-positive price in payload");
        const Date d = Date::from_days(day);
        if (!out.empty() && !(out.back().date < d)) {
            if (out.back().date == d) continue;
            throw FetchError("payload timestamps are not increasing");
        }
        out.push_back({d, price});
    }
    if (out.empty()) throw FetchError("no data between " + start.to_string() + " and " + end.to_string());
    return out;
}

std::string format_history_csv(const std::string& asset, const std::vector<DailyPrice>& rows) {
    std::string out = "date," + asset + "\n";
    for (const auto& r : rows) out += r.date.to_string() + "," + format_price(r.price) + "\n";
    return out;
}

HistoryFetcher::HistoryFetcher(FetchOptions opt) : opt_(std::move(opt)) {
    const auto scheme_end = opt_.api_base.find("://");
    if (scheme_end == std::string::npos) throw FetchError("API base must include a scheme: " + opt_.api_base);
    const auto path_start = opt_.api_base.find('/', scheme_end + 3);
    scheme_host_ = opt_.api_base.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : opt_.api_base.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

void HistoryFetcher::wait_for_slot() {
    if (last_request_ms_ >= 0) {
        const std::int64_t wait = last_request_ms_ + opt_.delay_ms - now_ms();
        if (wait > 0) std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    }
    last_request_ms_ = now_ms();
}

std::string HistoryFetcher::get_range(const std::string& asset, const Date& start, const Date& end) {
    if (asset.empty() || asset.find_first_of("/?#& ") != std::string::npos) {
        throw FetchError("invalid asset id '" + asset + "'");
    }
    const std::int64_t from = start.to_days() * 86400;
    const std::int64_t to = (end.to_days() + 1) * 86400 - 1;
    const std::string path = path_prefix_ + "/coins/" + asset + "/market_chart/range?vs_currency=" + opt_.vs_currency +
                             "&from=" + std::to_string(from) + "&to=" + std::to_string(to);

    httplib::Client client(scheme_host_);
    client.set_connection_timeout(opt_.timeout_s, 0);
    client.set_read_timeout(opt_.timeout_s, 0);
    client.set_follow_location(true);
    httplib::Headers headers{{"Accept", "application/json"}};
    if (!opt_.api_key.empty()) headers.emplace("x-cg-demo-api-key", opt_.api_key);

    std::string last_error;
    int backoff = opt_.backoff_ms;
    for (int attempt = 0; attempt <= opt_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        wait_for_slot();
        ++requests_;
        const auto res = client.Get(path, headers);
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return res->body;
        last_error = "HTTP " + std::to_string(res->status) + " for '" + asset + "'";
        if (res->status != 429 && res->status < 500) break;
    }
    throw FetchError(last_error);
}

std::filesystem::path HistoryFetcher::fetch_history(const std::string& asset, const Date& start, const Date& end,
                                                    const std::filesystem::path& out_dir) {
    if (end < start) throw FetchError("end date precedes start date");
    const auto rows = parse_market_chart(get_range(asset, start, end), start, end);
    const std::string text = format_history_csv(asset, rows);
    std::filesystem::create_directories(out_dir);
    const auto target = out_dir / (asset + ".csv");
    const auto tmp = out_dir / (asset + ".csv.part");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FetchError("cannot write '" + tmp.string() + "'");
        out << text;
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw FetchError("write failed for '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, target);
    return target;
}

PriceMatrix fetch_panel(HistoryFetcher& fetcher, const std::vector<std::string>& assets, const Date& start,
                        const Date& end, const std::filesystem::path& out_dir) {
    std::vector<PriceMatrix> parts;
    for (const auto& a : assets) parts.push_back(load_csv(fetcher.fetch_history(a, start, end, out_dir)));
    return merge_on_common_dates(parts);
}

}  // namespace rankfolio
