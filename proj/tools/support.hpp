#ifndef GRUSHIN_TOOLS_SUPPORT_HPP
#define GRUSHIN_TOOLS_SUPPORT_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace grushin::cli {

using json = nlohmann::ordered_json;

/// Thrown for unreadable configs or unwritable outputs; exit status 1.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, '.' separator.
std::string fmt(double v);

std::vector<double> parse_doubles(const std::string& s);
std::vector<int> parse_ints(const std::string& s);

/// LF-terminated CSV with a fixed header.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

void write_json(const std::filesystem::path& path, const json& j);

/// Loads a JSON config and turns it into command-line tokens: {"delta": 0.75,
/// "R": [8, 16]} -> --delta 0.75 --R 8,16; "command" names the subcommand.
struct ConfigTokens {
  std::vector<std::string> command;
  std::vector<std::string> options;
};
ConfigTokens load_config(const std::string& path);

}  // namespace grushin::cli

#endif  // GRUSHIN_TOOLS_SUPPORT_HPP
