#include "maskvid/kvconfig.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "maskvid/errors.hpp"

namespace maskvid {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw NumericError("double formatting failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("expected a real number, got '" + std::string(text) + "'");
  return v;
}

long long parse_int(std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("expected an integer, got '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("expected an unsigned integer, got '" + std::string(text) + "'");
  return v;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        " has an empty key");
    if (kv.contains(key))
      throw ConfigError("duplicate config key '" + std::string(key) + "'");
    kv.entries_.push_back({std::string(key), std::string(value)});
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KeyValueFile::set(std::string_view key, std::string_view value) {
  for (Entry& e : entries_) {
    if (e.key == key) {
      e.value = std::string(value);
      return;
    }
  }
  entries_.push_back({std::string(key), std::string(value)});
}

void KeyValueFile::comment(std::string_view text) {
  entries_.push_back({std::string(), std::string(text)});
}

const std::string* KeyValueFile::find(std::string_view key) const {
  for (const Entry& e : entries_)
    if (e.key == key) return &e.value;
  return nullptr;
}

std::string KeyValueFile::serialize() const {
  std::string out;
  for (const Entry& e : entries_) {
    if (e.key.empty()) {
      out += "# " + e.value + "\n";
    } else {
      out += e.key + " = " + e.value + "\n";
    }
  }
  return out;
}

void KeyValueFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize();
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<std::string> KeyValueFile::keys() const {
  std::vector<std::string> out;
  for (const Entry& e : entries_)
    if (!e.key.empty()) out.push_back(e.key);
  return out;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  text = trim(text);
  if (text.empty()) return out;
  while (true) {
    const std::size_t comma = text.find(',');
    out.emplace_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

}  // namespace maskvid
