#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace exem {

/// Flat `key = value` settings. Later assignments to a key replace earlier ones.
using ConfigMap = std::map<std::string, std::string>;

/// One `key = value` per line; `#` starts a comment, blank lines are skipped.
/// List values are written `[a, b, c]` or `a, b, c`. Throws ParseError.
ConfigMap parse_config(std::istream& in);
ConfigMap load_config(const std::filesystem::path& path);

/// Overlays `top` onto `base`, returning the merged map.
ConfigMap merge_config(ConfigMap base, const ConfigMap& top);

/// Splits a list value, dropping optional brackets and surrounding blanks.
/// An empty string or "[]" gives an empty list.
std::vector<std::string> split_list(std::string_view value);

std::string trim(std::string_view s);

}  // namespace exem
