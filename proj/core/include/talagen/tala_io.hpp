#pragma once

// Tala definition documents (UTF-8 JSON).
//
//   {
//     "name": "tintal",
//     "beats": [["Dha"], ["Dhin"], ...],     "-" marks a Rest
//     "vibhags": [4, 4, 4, 4],
//     "vocabulary": ["Dha", "Dhin", "Tin", "Ta"],
//     "ratio": [3, 3, 1, 1],
//     "filler": ["Ti", "Ra", "Ki", "Ta"],     optional
//     "categories": {"Dha": "resonant-both"}  optional
//   }
//
// Unknown keys are ignored.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "talagen/rhythm.hpp"

namespace talagen {

/// Parses and validates a definition. Throws ParseError or ValidationError.
TalaDefinition load_tala(std::string_view text);

std::string save_tala(const TalaDefinition& tala);

TalaDefinition load_tala_file(const std::filesystem::path& path);
void save_tala_file(const TalaDefinition& tala, const std::filesystem::path& path);

/// Every `*.json` in `dir`, sorted by file name.
std::vector<TalaDefinition> load_tala_dir(const std::filesystem::path& dir);

}  // namespace talagen
