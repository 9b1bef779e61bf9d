#include "metastack/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace metastack::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void data_error(const fs::path& path, std::size_t line, const std::string& what) {
    fail(ErrorKind::DataError, path.string() + ":" + std::to_string(line) + ": " + what);
}

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

struct Table {
    std::vector<std::string> header;
    std::vector<Timestamp> timestamps;
    std::vector<double> values;  // row-major, header.size() - 1 per row
};

Table read_table(const fs::path& path, std::size_t min_columns) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::DataError, "cannot open " + path.string());

    Table table;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) data_error(path, 1, "empty file");
    ++line_no;
    for (auto f : split_fields(strip_cr(line))) table.header.emplace_back(f);
    if (table.header.size() < min_columns) data_error(path, 1, "too few columns in header");
    if (table.header[0] != "timestamp" || table.header[1] != "y")
        data_error(path, 1, "header must start with 'timestamp,y'");
    for (std::size_t i = 2; i < table.header.size(); ++i) {
        if (table.header[i].empty()) data_error(path, 1, "empty model name in column " + std::to_string(i + 1));
        for (std::size_t j = 1; j < i; ++j) {
            if (table.header[j] == table.header[i]) data_error(path, 1, "duplicate column '" + table.header[i] + "'");
        }
    }

    const std::size_t width = table.header.size();
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = strip_cr(line);
        if (text.empty()) continue;
        const auto fields = split_fields(text);
        if (fields.size() != width) {
            data_error(path, line_no, "expected " + std::to_string(width) + " fields, found " +
                                          std::to_string(fields.size()));
        }
        try {
            const Timestamp ts = parse_timestamp(fields[0]);
            if (!table.timestamps.empty() && ts - table.timestamps.back() != std::chrono::hours{1})
                data_error(path, line_no, "timestamps are not consecutive hours");
            table.timestamps.push_back(ts);
            for (std::size_t j = 1; j < width; ++j) table.values.push_back(parse_double(fields[j]));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::DataError && std::string_view(e.what()).starts_with(path.string())) throw;
            data_error(path, line_no, e.what());
        }
    }
    if (table.timestamps.empty()) data_error(path, line_no, "no data rows");
    return table;
}

} // namespace

std::string format_timestamp(Timestamp ts) {
    const auto day = std::chrono::floor<std::chrono::days>(ts);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{ts - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    const std::string original(text);
    auto bad = [&]() -> Timestamp { fail(ErrorKind::DataError, "invalid timestamp '" + original + "'"); };
    if (text.ends_with("Z")) {
        text.remove_suffix(1);
    } else if (text.ends_with("+00:00")) {
        text.remove_suffix(6);
    }
    // YYYY-MM-DDTHH:MM or YYYY-MM-DDTHH:MM:SS
    if (text.size() != 16 && text.size() != 19) return bad();
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') return bad();
    if (text.size() == 19 && text[16] != ':') return bad();
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d) ||
        !parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi))
        return bad();
    if (text.size() == 19 && !parse_int(text.substr(17, 2), s)) return bad();
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) return bad();
    return Timestamp{std::chrono::sys_days{ymd}} + std::chrono::hours{h} + std::chrono::minutes{mi} +
           std::chrono::seconds{s};
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, res.ptr};
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    if (!text.empty() && text.front() == '+') ++first;
    const auto res = std::from_chars(first, text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        fail(ErrorKind::DataError, "invalid number '" + std::string(text) + "'");
    if (!std::isfinite(v)) fail(ErrorKind::DataError, "non-finite value '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        auto field = line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        out.push_back(field);
        if (comma == std::string_view::npos) break;
        begin = comma + 1;
    }
    return out;
}

void write_panel_csv(const fs::path& path, const AlignedPanel& data) {
    std::string out = "timestamp,y";
    for (const auto& name : data.panel().model_names()) out += "," + name;
    out += '\n';
    const auto ts = data.series().timestamps();
    for (TimeIndex t = 1; t <= data.length(); ++t) {
        out += format_timestamp(ts[t - 1]);
        out += ',';
        out += format_double(data.target(t));
        for (double v : data.pattern(t)) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    write_text(path, out);
}

AlignedPanel read_panel_csv(const fs::path& path) {
    Table table = read_table(path, 3);
    const std::size_t rows = table.timestamps.size();
    const std::size_t width = table.header.size() - 1;
    std::vector<double> y(rows);
    std::vector<double> panel;
    panel.reserve(rows * (width - 1));
    for (std::size_t r = 0; r < rows; ++r) {
        y[r] = table.values[r * width];
        panel.insert(panel.end(), table.values.begin() + static_cast<std::ptrdiff_t>(r * width + 1),
                     table.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
    }
    std::vector<std::string> names(table.header.begin() + 2, table.header.end());
    SeriesFrame series(table.timestamps, std::move(y));
    return align_panel(std::move(series),
                       ForecastPanel(std::move(table.timestamps), std::move(names), std::move(panel)));
}

void write_series_csv(const fs::path& path, const SeriesFrame& series) {
    std::string out = "timestamp,y\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_timestamp(series.timestamps()[i]);
        out += ',';
        out += format_double(series.values()[i]);
        out += '\n';
    }
    write_text(path, out);
}

SeriesFrame read_series_csv(const fs::path& path) {
    Table table = read_table(path, 2);
    if (table.header.size() != 2) data_error(path, 1, "series files have exactly the columns 'timestamp,y'");
    return SeriesFrame(std::move(table.timestamps), std::move(table.values));
}

std::vector<NamedPanel> load_panels(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) fail(ErrorKind::DataError, "data directory not found: " + dir.string());
    std::vector<std::pair<std::string, fs::path>> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string file = entry.path().filename().string();
        if (entry.is_regular_file() && file.starts_with("panel_") && file.ends_with(".csv") && file.size() > 10)
            found.emplace_back(file.substr(6, file.size() - 10), entry.path());
    }
    if (found.empty()) fail(ErrorKind::DataError, "no panel_<name>.csv files in " + dir.string());
    std::sort(found.begin(), found.end());
    std::vector<NamedPanel> out;
    for (auto& [name, path] : found) {
        try {
            out.push_back({name, read_panel_csv(path)});
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::DataError) throw;
            fail(ErrorKind::DataError, path.string() + ": " + e.what());
        }
    }
    return out;
}

void write_text(const fs::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace metastack::io
