#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankfolio/date.h"
#include "rankfolio/price_matrix.h"

namespace rankfolio {

class FetchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FetchOptions {
    // Overridden by RANKFOLIO_API_BASE when set; see from_environment().
    std::string api_base = "https://api.coingecko.com/api/v3";
    std::string api_key;  // sent as x-cg-demo-api-key when non-empty
    std::string vs_currency = "usd";
    int delay_ms = 1500;    // minimum gap between consecutive requests
    int retries = 4;        // extra attempts after the first
    int backoff_ms = 2000;  // doubles after every failed attempt
    int timeout_s = 30;

    static FetchOptions from_environment();
};

struct DailyPrice {
    Date date;
    double price = 0.0;
};

// Parses a market_chart payload ({"prices": [[ms, price], ...]}), keeping the
// first observation of each UTC date within [start, end]. Throws FetchError on
// malformed or empty payloads.
std::vector<DailyPrice> parse_market_chart(const std::string& body, const Date& start, const Date& end);

// "date,<asset>" CSV; prices use the same 12-significant-digit format as
// write_csv.
std::string format_history_csv(const std::string& asset, const std::vector<DailyPrice>& rows);

class HistoryFetcher {
public:
    explicit HistoryFetcher(FetchOptions opt);

    // Downloads [start, end] for one asset and writes <out_dir>/<asset>.csv
    // (atomically; nothing is written on failure). Returns the file path.
    std::filesystem::path fetch_history(const std::string& asset, const Date& start, const Date& end,
                                        const std::filesystem::path& out_dir);

    // Raw body of the range endpoint, with rate limiting and retries.
    std::string get_range(const std::string& asset, const Date& start, const Date& end);
    int requests_made() const { return requests_; }

private:
    void wait_for_slot();

    FetchOptions opt_;
    std::string scheme_host_;
    std::string path_prefix_;
    int requests_ = 0;
    std::int64_t last_request_ms_ = -1;
};

// Fetches each asset in turn, then inner-joins them into one panel.
PriceMatrix fetch_panel(HistoryFetcher& fetcher, const std::vector<std::string>& assets, const Date& start,
                        const Date& end, const std::filesystem::path& out_dir);

}  // namespace rankfolio
