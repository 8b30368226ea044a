#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hgde::cli {

struct KeyInfo {
  std::string_view name;
  std::string_view fallback;
  std::string_view help;
};

/// Every key a configuration may contain, with its global default.
std::span<const KeyInfo> known_keys();

/// Flat key=value settings. Unknown keys are rejected with InputError.
class RunConfig {
 public:
  /// Defaults for `command`; convergence studies use T=1 and dim=4.
  static RunConfig defaults(std::string_view command);

  void set(std::string_view key, std::string value);
  /// Reads `key = value` lines; `#` starts a comment.
  void merge_file(const std::filesystem::path& path);

  const std::string& text(std::string_view key) const;
  double number(std::string_view key) const;
  long long integer(std::string_view key) const;
  std::uint64_t unsigned_integer(std::string_view key) const;
  bool boolean(std::string_view key) const;
  std::vector<double> numbers(std::string_view key) const;
  std::vector<std::string> list(std::string_view key) const;
  /// Like text() but throws when the value is empty.
  const std::string& required(std::string_view key) const;

  nlohmann::ordered_json to_json() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace hgde::cli
