#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maskvid {

// Shortest decimal string that round-trips the exact double; locale- and
// platform-stable, so serialized reports are byte-reproducible.
std::string format_double(double value);

double parse_double(std::string_view text);          // throws ConfigError
long long parse_int(std::string_view text);          // throws ConfigError
std::uint64_t parse_u64(std::string_view text);      // throws ConfigError

// Flat "key = value" text with dotted keys; '#' lines are comments. Keys keep
// insertion order so serialization is deterministic. Used for both run
// configs and reports.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  void set(std::string_view key, std::string_view value);
  void set(std::string_view key, double value) { set(key, format_double(value)); }
  void set(std::string_view key, long long value) { set(key, std::to_string(value)); }
  void set(std::string_view key, std::uint64_t value) { set(key, std::to_string(value)); }
  void comment(std::string_view text);

  const std::string* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  // Present keys, in insertion order; comments excluded.
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    std::string key;  // empty for comment lines
    std::string value;
  };
  std::vector<Entry> entries_;
};

// Splits on commas, trimming whitespace; empty input gives an empty list.
std::vector<std::string> split_list(std::string_view text);

}  // namespace maskvid
