#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mstates {

// FNV-1a over raw bytes. Used for content fingerprints in run manifests;
// not cryptographic, collisions only risk a redundant recompute.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

// Shortest decimal form that round-trips an IEEE double ("%.17g").
// Every numeric file the pipeline writes goes through this so that a
// resumed stage reads bit-identical values.
std::string format_double(double x);
double parse_double(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temp file and rename, so interrupted runs never
// leave a truncated stage output that a resume would mistake for valid.
void write_text_file(const std::filesystem::path& path, std::string_view content);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace mstates
