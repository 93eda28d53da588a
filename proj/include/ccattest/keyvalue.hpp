#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ccattest {

// Line-oriented key=value text. '#' starts a comment, blank lines are
// ignored, whitespace around keys and values is trimmed. Duplicate keys and
// lines without '=' are rejected with Error(kBadConfig).
class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const { return values_; }

  // Throws Error(kBadConfig) naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
};

std::uint64_t parse_u64(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);
std::vector<std::string> split_list(std::string_view text);

}  // namespace ccattest
