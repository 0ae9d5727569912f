#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "talagen/rhythm.hpp"
#include "talagen/sample_bank.hpp"

namespace talagen::cli {

/// Explicit path, else $TALAGEN_BANK, else nullopt (synthetic bank).
std::optional<std::filesystem::path> bank_path(const std::string& flag);

/// WAV bank from `bank_path(flag)`, or the synthetic bank at `sample_rate`
/// covering every stroke of `talas`. A loaded bank keeps its own rate; a
/// requested rate that differs is an error.
std::shared_ptr<const StrokeSampleBank> load_bank(const std::string& flag, int sample_rate,
                                                  const std::vector<TalaDefinition>& talas);

/// Definitions from `dir`, or the built-in talas when `dir` is empty.
std::vector<TalaDefinition> load_talas(const std::string& dir);

/// The named tala; the error lists what is available.
const TalaDefinition& require_tala(const std::vector<TalaDefinition>& talas, const std::string& name);

std::string tala_names(const std::vector<TalaDefinition>& talas);

/// "on"/"off" style switches used by several flags.
bool parse_switch(const std::string& text, const char* flag);

/// Writes to stdout when `path` is empty or "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace talagen::cli
