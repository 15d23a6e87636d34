#include "exem/config.hpp"

#include <fstream>
#include <istream>

#include "exem/error.hpp"

namespace exem {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!value.empty() && value.front() == '[' && value.back() != ']') throw ParseError("unterminated list", line_no);
    out[std::move(key)] = std::move(value);
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

ConfigMap merge_config(ConfigMap base, const ConfigMap& top) {
  for (const auto& [k, v] : top) base[k] = v;
  return base;
}

std::vector<std::string> split_list(std::string_view value) {
  std::string body = trim(value);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw ConfigError("unterminated list '" + body + "'");
    body = trim(std::string_view(body).substr(1, body.size() - 2));
  }
  std::vector<std::string> out;
  if (body.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = body.find(',', start);
    std::string item = trim(std::string_view(body).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw ConfigError("empty list element in '" + body + "'");
    out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace exem
