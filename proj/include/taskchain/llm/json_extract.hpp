#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace taskchain {

// First JSON object in a model reply. Code-fence markers are dropped, prose
// around the object is ignored, and candidates are tried in order of their
// opening brace. A candidate that is not strict JSON is retried once with
// Python literals (True/False/None) mapped to JSON.
//
// Throws NoJsonFound when the text has no '{' at all, MalformedJson when
// there are braces but no candidate parses.
nlohmann::json extract_json_block(std::string_view text);

}  // namespace taskchain
