#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metastack/pipeline.hpp"
#include "metastack/synth.hpp"

namespace metastack::io {

struct IniEntry {
    std::string section;  ///< empty before the first header
    std::string key;
    std::string value;
    std::size_t line;
};

/// Line-oriented `key = value` text with `[section]` headers. '#' and ';'
/// start comment lines. Syntax errors throw `kind` with source:line context.
std::vector<IniEntry> parse_ini(std::string_view text, std::string_view source, ErrorKind kind);

struct ImportanceOptions {
    int bins = 10;
    std::size_t neighbours = 10;
    std::size_t samples = 0;  ///< 0 = every instance
};

struct RunConfig {
    pipeline::ExperimentConfig experiment;
    ImportanceOptions importance;
};

/// Overlays the keys in `text` on `base`. Unknown sections, unknown or repeated
/// keys and malformed values throw ConfigError naming the key and line.
RunConfig parse_run_config(std::string_view text, std::string_view source, RunConfig base = {});

/// Full echo in the format parse_run_config reads.
std::string format_run_config(const RunConfig& config);

struct SynthPlan {
    std::vector<std::pair<std::string, synth::SynthSpec>> series;
    /// Per series, the base bank (defaults unless `[model <name>]` sections are given).
    std::vector<synth::BaseBankSpec> banks;
};

/// One series named "synth" with the default spec and bank.
SynthPlan default_synth_plan(std::optional<std::uint64_t> seed = std::nullopt);

/// `[synth]` keys: series, name, length, level, daily_amp, weekly_amp,
/// yearly_amp, noise_sd, seed, start. `[model <name>]` keys: kind, bias,
/// noise_sd, seed. With series = N > 1, series i is named <name>NN and uses
/// seed + i - 1. Throws SpecParseError naming the key and line.
SynthPlan parse_synth_spec(std::string_view text, std::string_view source,
                           std::optional<std::uint64_t> seed = std::nullopt);

} // namespace metastack::io
