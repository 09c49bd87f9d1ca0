#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mstates/panel.hpp"

namespace mstates {

// Transport seam: production uses HTTP, tests substitute a recorded
// fixture. get() returns the response body or throws on failure.
class HttpClient {
public:
    virtual ~HttpClient() = default;
    virtual std::string get(const std::string& path_and_query) = 0;
};

// Plain-HTTP client against a configurable base URL.
std::unique_ptr<HttpClient> make_http_client(const std::string& base_url);

struct FetchConfig {
    std::string base_url;                     // e.g. http://127.0.0.1:8080
    std::string path_template = "/history/{coin}";  // {coin} substituted
    std::string query_template = "from={from}&to={to}";  // optional; {from},{to} ISO dates
    int rate_limit_rpm = 120;  // request budget; 0 disables the limiter
    int max_retries = 3;       // attempts per coin before giving up
};

// Fetches one CSV per coin (canonical `date,coin_id,close,market_cap`
// schema) into `<cache_dir>/<coin_id>.csv`, then assembles the panel
// restricted to [from, to]. Warm cache entries are trusted as-is, so a
// second call does zero network work and yields byte-identical results.
// Failures after the retry budget name the coin. An empty coin list
// produces an empty panel without touching the network.
PricePanel fetch_remote(HttpClient& client, const FetchConfig& config,
                        const std::vector<std::string>& coin_ids, Day from, Day to,
                        const std::filesystem::path& cache_dir);

}  // namespace mstates
