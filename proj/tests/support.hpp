#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "mstates/io_util.hpp"

namespace testsupport {

// Unique scratch directory under the system temp root, removed on
// destruction. Unique per process and per instance so parallel ctest
// invocations never collide.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const auto pid = static_cast<long long>(::getpid());
        path_ = std::filesystem::temp_directory_path() /
                ("mstates_" + tag + "_" + std::to_string(pid) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
