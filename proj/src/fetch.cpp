#include "mstates/fetch.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "mstates/ingest.hpp"
#include "mstates/io_util.hpp"

namespace mstates {

namespace {

class HttplibClient final : public HttpClient {
public:
    explicit HttplibClient(const std::string& base_url) : client_(base_url) {
        client_.set_connection_timeout(10, 0);
        client_.set_read_timeout(30, 0);
    }

    std::string get(const std::string& path_and_query) override {
        const httplib::Result res = client_.Get(path_and_query);
        if (!res) {
            throw std::runtime_error("HTTP transport error: " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw std::runtime_error("HTTP status " + std::to_string(res->status));
        }
        return res->body;
    }

private:
    httplib::Client client_;
};

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at)) {
        text.replace(at, key.size(), value);
        at += value.size();
    }
    return text;
}

// Evenly spaced request slots derived from the per-minute budget.
class RateLimiter {
public:
    explicit RateLimiter(int rpm) {
        if (rpm > 0) interval_ = std::chrono::nanoseconds(60'000'000'000ll / rpm);
    }

    void acquire() {
        if (interval_.count() == 0) return;
        const auto now = std::chrono::steady_clock::now();
        if (has_last_ && now < last_ + interval_) {
            std::this_thread::sleep_until(last_ + interval_);
            last_ += interval_;
        } else {
            last_ = now;
        }
        has_last_ = true;
    }

private:
    std::chrono::nanoseconds interval_{0};
    std::chrono::steady_clock::time_point last_{};
    bool has_last_ = false;
};

}  // namespace

std::unique_ptr<HttpClient> make_http_client(const std::string& base_url) {
    return std::make_unique<HttplibClient>(base_url);
}

PricePanel fetch_remote(HttpClient& client, const FetchConfig& config,
                        const std::vector<std::string>& coin_ids, Day from, Day to,
                        const std::filesystem::path& cache_dir) {
    if (from > to) throw std::invalid_argument("fetch_remote: from > to");

    PricePanel empty;
    empty.close.resize(0, 0);
    empty.market_cap.resize(0, 0);
    if (coin_ids.empty()) return empty;

    ensure_directory(cache_dir);
    RateLimiter limiter(config.rate_limit_rpm);
    const std::string from_str = format_iso_date(from);
    const std::string to_str = format_iso_date(to);

    std::string merged = "date,coin_id,close,market_cap\n";
    for (const std::string& coin : coin_ids) {
        const std::filesystem::path cache_file = cache_dir / (coin + ".csv");
        std::string body;
        if (std::filesystem::exists(cache_file)) {
            body = read_text_file(cache_file);
        } else {
            std::string path = substitute(config.path_template, "{coin}", coin);
            std::string query = substitute(
                substitute(config.query_template, "{from}", from_str), "{to}", to_str);
            if (!query.empty()) path += "?" + query;

            std::string last_error;
            bool fetched = false;
            for (int attempt = 0; attempt < std::max(1, config.max_retries); ++attempt) {
                limiter.acquire();
                try {
                    body = client.get(path);
                    fetched = true;
                    break;
                } catch (const std::exception& e) {
                    last_error = e.what();
                }
            }
            if (!fetched) {
                throw std::runtime_error("fetch failed for coin '" + coin + "': " + last_error);
            }
            // Validate before caching: a malformed body must not poison
            // future warm-cache runs.
            parse_panel_csv_text(body);
            write_text_file(cache_file, body);
        }

        // Append the per-coin rows, skipping the header line.
        const std::size_t eol = body.find('\n');
        if (eol != std::string::npos) merged += body.substr(eol + 1);
        if (!merged.empty() && merged.back() != '\n') merged += '\n';
    }

    const PricePanel full = parse_panel_csv_text(merged);
    if (full.n_dates() == 0) return full;
    return slice_panel(full, from, to);
}

}  // namespace mstates
