#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metastack/importance.hpp"
#include "metastack/io/config.hpp"
#include "metastack/pipeline.hpp"

namespace metastack::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Profile { Desk, Full };

struct Options {
    std::optional<std::filesystem::path> config;
    std::filesystem::path data = "data";
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    Profile profile = Profile::Desk;
    bool svg = false;
};

/// 0 success, 2 config error, 3 data error, 4 internal invariant violation.
int exit_code(ErrorKind kind) noexcept;

/// Profile preset, then the config file, then --seed.
io::RunConfig resolve_config(const Options& options);

/// File name -> contents, in the order they are written.
using Reports = std::map<std::string, std::string>;

Reports render_reports(const pipeline::RunResult& result, const io::RunConfig& config);

struct ImportanceReport {
    std::vector<importance::FeatureScore> mrmr;      ///< MRMR selection order
    std::vector<importance::FeatureScore> rrelieff;  ///< descending weight
};

ImportanceReport rank_importance(const AlignedPanel& data, const io::ImportanceOptions& options);
std::string render_importance_csv(const ImportanceReport& report);
/// Two horizontal bar charts side by side, one per method.
std::string render_importance_svg(const ImportanceReport& report, std::string_view title);

/// Writes series_<name>.csv (with the warm-up hours) and panel_<name>.csv per
/// series of the spec given by --config, or the default spec.
std::vector<std::filesystem::path> cmd_synth(const Options& options);
std::vector<std::filesystem::path> cmd_run(const Options& options);
std::vector<std::filesystem::path> cmd_importance(const Options& options);

} // namespace metastack::cli
