#pragma once

// Flat `key = value` text files (manifests) and small parsing helpers.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigt::cli {

/// Bad command-line usage (exit code 1).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing, unreadable or incompatible input data (exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Blank lines and `#` comments are skipped; every other line must be
/// `key = value`. Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& source);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
void write_key_values(std::ostream& out, const KeyValues& kv);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Comma-separated values; whitespace around items is ignored. An empty
/// list (or an empty item) is a UsageError naming `what`.
std::vector<std::string> split_list(const std::string& s, const std::string& what);
double parse_double(const std::string& s, const std::string& what);
std::uint64_t parse_uint(const std::string& s, const std::string& what);

}  // namespace sigt::cli
