#ifndef TABAYES_CONFIG_HPP
#define TABAYES_CONFIG_HPP

#include <istream>
#include <map>
#include <string>

namespace tabayes {

/// Flat "key = value" text. Blank lines and lines starting with '#' are
/// skipped; keys and values are trimmed. A repeated key is an error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::string& path);

}  // namespace tabayes

#endif  // TABAYES_CONFIG_HPP
