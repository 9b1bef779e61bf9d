#include "metastack/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace metastack {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NonHourlyTimestamps: return "NonHourlyTimestamps";
    case ErrorKind::EmptyQuery: return "EmptyQuery";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::ZeroTarget: return "ZeroTarget";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::RangeTooSmall: return "RangeTooSmall";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::SpecParseError: return "SpecParseError";
    case ErrorKind::DataError: return "DataError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

namespace {

void check_hourly(std::span<const Timestamp> timestamps) {
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] - timestamps[i - 1] != std::chrono::hours{1}) {
            fail(ErrorKind::NonHourlyTimestamps,
                 "timestamps must advance by exactly one hour (row " + std::to_string(i + 1) + ")");
        }
    }
}

} // namespace

SeriesFrame::SeriesFrame(std::vector<Timestamp> timestamps, std::vector<double> values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
    require(!values_.empty(), ErrorKind::LengthMismatch, "series must hold at least one value");
    require(timestamps_.size() == values_.size(), ErrorKind::LengthMismatch,
            "series has " + std::to_string(timestamps_.size()) + " timestamps but " +
                std::to_string(values_.size()) + " values");
    check_hourly(timestamps_);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        require(std::isfinite(values_[i]), ErrorKind::NonFiniteValue,
                "series value at row " + std::to_string(i + 1) + " is not finite");
    }
}

ForecastPanel::ForecastPanel(std::vector<Timestamp> timestamps, std::vector<std::string> model_names,
                             std::vector<double> row_major)
    : timestamps_(std::move(timestamps)), model_names_(std::move(model_names)), data_(std::move(row_major)) {
    require(!model_names_.empty(), ErrorKind::InvalidArgument, "panel needs at least one model column");
    std::set<std::string> seen(model_names_.begin(), model_names_.end());
    require(seen.size() == model_names_.size(), ErrorKind::InvalidArgument, "model names must be distinct");
    require(data_.size() == timestamps_.size() * model_names_.size(), ErrorKind::LengthMismatch,
            "panel matrix does not match " + std::to_string(timestamps_.size()) + " rows x " +
                std::to_string(model_names_.size()) + " models");
    check_hourly(timestamps_);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            fail(ErrorKind::NonFiniteValue, "panel entry at row " + std::to_string(i / width() + 1) +
                                                ", model '" + model_names_[i % width()] + "' is not finite");
        }
    }
}

std::vector<double> ForecastPanel::column(std::size_t j) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = data_[r * width() + j];
    return out;
}

AlignedPanel align_panel(SeriesFrame series, ForecastPanel panel) {
    require(series.size() == panel.rows(), ErrorKind::LengthMismatch,
            "series has " + std::to_string(series.size()) + " rows but panel has " +
                std::to_string(panel.rows()));
    const auto a = series.timestamps();
    const auto b = panel.timestamps();
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a[i] == b[i], ErrorKind::LengthMismatch,
                "series and panel timestamps differ at row " + std::to_string(i + 1));
    }
    AlignedPanel out;
    out.series_ = std::move(series);
    out.panel_ = std::move(panel);
    return out;
}

void SelectorSpec::validate() const {
    require(k >= 1, ErrorKind::InvalidArgument, "selector k must be >= 1");
    require(c >= 1, ErrorKind::InvalidArgument, "selector c must be >= 1");
    require(s1 >= 1, ErrorKind::InvalidArgument, "selector s1 must be >= 1");
    require(s2 >= s1 && s2 % s1 == 0, ErrorKind::InvalidArgument, "selector s2 must be a positive multiple of s1");
    require(h >= 1, ErrorKind::InvalidArgument, "selector h must be >= 1");
}

TrainingSet TrainingSet::from_panel(const AlignedPanel& data, std::span<const TimeIndex> indices, TimeIndex t,
                                    std::size_t h) {
    require(t > h, ErrorKind::EmptyWindow, "query time leaves no history");
    const TimeIndex last_allowed = t - h;
    TrainingSet set;
    set.width_ = data.width();
    set.indices_.assign(indices.begin(), indices.end());
    set.patterns_.reserve(indices.size() * set.width_);
    set.targets_.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const TimeIndex tau = indices[i];
        require(tau >= 1 && tau <= last_allowed, ErrorKind::InvariantViolation,
                "training index " + std::to_string(tau) + " outside 1.." + std::to_string(last_allowed));
        require(i == 0 || indices[i - 1] < tau, ErrorKind::InvariantViolation,
                "training indices must be strictly increasing");
        const auto p = data.pattern(tau);
        set.patterns_.insert(set.patterns_.end(), p.begin(), p.end());
        set.targets_.push_back(data.target(tau));
    }
    return set;
}

TrainingSet TrainingSet::from_rows(const std::vector<std::vector<double>>& patterns, std::vector<double> targets) {
    require(patterns.size() == targets.size(), ErrorKind::LengthMismatch, "patterns and targets differ in length");
    TrainingSet set;
    set.width_ = patterns.empty() ? 0 : patterns.front().size();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        require(patterns[i].size() == set.width_, ErrorKind::LengthMismatch, "ragged pattern rows");
        set.patterns_.insert(set.patterns_.end(), patterns[i].begin(), patterns[i].end());
        set.indices_.push_back(i + 1);
    }
    set.targets_ = std::move(targets);
    return set;
}

TrainingSet TrainingSet::subset(std::span<const std::size_t> positions) const {
    TrainingSet out;
    out.width_ = width_;
    out.indices_.reserve(positions.size());
    out.targets_.reserve(positions.size());
    out.patterns_.reserve(positions.size() * width_);
    for (std::size_t pos : positions) {
        out.indices_.push_back(indices_.at(pos));
        out.targets_.push_back(targets_[pos]);
        const auto p = pattern(pos);
        out.patterns_.insert(out.patterns_.end(), p.begin(), p.end());
    }
    return out;
}

Interval z_interval(std::span<const double> query) {
    require(!query.empty(), ErrorKind::EmptyQuery, "query has no base forecasts");
    const auto [lo, hi] = std::minmax_element(query.begin(), query.end());
    return {*lo, *hi};
}

} // namespace metastack
