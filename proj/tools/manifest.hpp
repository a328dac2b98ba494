#ifndef LSI_TOOLS_MANIFEST_HPP
#define LSI_TOOLS_MANIFEST_HPP

#include <lsi/format.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace lsi::cli {

// Hex SHA-256 of the file contents.
std::string file_sha256(const std::filesystem::path& path);

// Ordered `key=value` lines.
class Manifest {
 public:
  template <typename T>
  void set(std::string key, const T& value) {
    if constexpr (std::is_same_v<T, bool>) {
      entries_.emplace_back(std::move(key), value ? "true" : "false");
    } else if constexpr (std::is_floating_point_v<T>) {
      entries_.emplace_back(std::move(key), format_shortest(static_cast<double>(value)));
    } else if constexpr (std::is_convertible_v<T, std::string>) {
      entries_.emplace_back(std::move(key), std::string(value));
    } else {
      entries_.emplace_back(std::move(key), std::to_string(value));
    }
  }

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace lsi::cli

#endif  // LSI_TOOLS_MANIFEST_HPP
