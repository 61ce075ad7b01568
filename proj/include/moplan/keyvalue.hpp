#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace moplan {

/// `key = value` lines; '#' starts a comment. Keys may repeat (list entries).
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, std::string_view source = "<stream>");
  static KeyValueFile load(const std::filesystem::path& path);

  /// Last value for `key`.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  bool contains(std::string_view key) const { return get(key).has_value(); }

  double get_double(std::string_view key, double fallback) const;
  std::vector<double> get_doubles(std::string_view key) const;

  /// Resolves a path-valued entry relative to the file's directory.
  std::filesystem::path resolve(const std::string& value) const;

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::vector<std::string_view>& allowed) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::filesystem::path base_dir_;
  std::string source_;
};

/// Comma-separated doubles, e.g. "0.2,0.3,0.5". Throws ConfigError on bad tokens.
std::vector<double> parse_double_list(std::string_view text);

}  // namespace moplan
