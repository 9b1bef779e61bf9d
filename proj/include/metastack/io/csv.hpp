#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::io {

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp ts);

/// Accepts "YYYY-MM-DDTHH:MM[:SS]" with an optional "Z" or "+00:00" suffix and
/// a space in place of the "T". Throws DataError.
Timestamp parse_timestamp(std::string_view text);

/// Shortest form that still carries 17 significant digits, so reading it back
/// reproduces the value exactly.
std::string format_double(double v);

/// Throws DataError on anything that is not a complete finite decimal number.
double parse_double(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line);

/// Header `timestamp,y,<model1>,...`.
void write_panel_csv(const std::filesystem::path& path, const AlignedPanel& data);
AlignedPanel read_panel_csv(const std::filesystem::path& path);

/// Header `timestamp,y`.
void write_series_csv(const std::filesystem::path& path, const SeriesFrame& series);
SeriesFrame read_series_csv(const std::filesystem::path& path);

struct NamedPanel {
    std::string name;
    AlignedPanel data;
};

/// Every `panel_<name>.csv` in `dir`, ordered by name. Throws DataError when none exist.
std::vector<NamedPanel> load_panels(const std::filesystem::path& dir);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

} // namespace metastack::io
