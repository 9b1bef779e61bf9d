#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metastack/error.hpp"

namespace metastack {

using Timestamp = std::chrono::sys_seconds;

// Time indices are 1-based throughout: index t addresses row t-1 of a series.
using TimeIndex = std::size_t;

/// Hourly target series of one region.
class SeriesFrame {
public:
    SeriesFrame() = default;
    /// Throws NonHourlyTimestamps, NonFiniteValue or LengthMismatch on invalid input.
    SeriesFrame(std::vector<Timestamp> timestamps, std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }
    std::span<const double> values() const noexcept { return values_; }
    double at(TimeIndex t) const { return values_.at(t - 1); }

private:
    std::vector<Timestamp> timestamps_;
    std::vector<double> values_;
};

/// T x n matrix of base forecasts, one column per base model, stored row-major.
class ForecastPanel {
public:
    ForecastPanel() = default;
    ForecastPanel(std::vector<Timestamp> timestamps, std::vector<std::string> model_names,
                  std::vector<double> row_major);

    std::size_t rows() const noexcept { return timestamps_.size(); }
    std::size_t width() const noexcept { return model_names_.size(); }
    std::span<const std::string> model_names() const noexcept { return model_names_; }
    std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Row r is 0-based.
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * width(), width()}; }
    std::vector<double> column(std::size_t j) const;

private:
    std::vector<Timestamp> timestamps_;
    std::vector<std::string> model_names_;
    std::vector<double> data_;
};

/// Validated series + panel pair of equal length and matching timestamps.
class AlignedPanel {
public:
    AlignedPanel() = default;

    std::size_t length() const noexcept { return series_.size(); }
    std::size_t width() const noexcept { return panel_.width(); }
    const SeriesFrame& series() const noexcept { return series_; }
    const ForecastPanel& panel() const noexcept { return panel_; }

    std::span<const double> pattern(TimeIndex t) const { return panel_.row(t - 1); }
    double target(TimeIndex t) const { return series_.at(t); }

private:
    friend AlignedPanel align_panel(SeriesFrame series, ForecastPanel panel);
    SeriesFrame series_;
    ForecastPanel panel_;
};

/// Throws LengthMismatch when lengths or timestamps disagree.
AlignedPanel align_panel(SeriesFrame series, ForecastPanel panel);

enum class SelectorKind { Global, KnnLocal, RecentV1, SeasonalV2, SeasonalV3 };

struct SelectorSpec {
    SelectorKind kind = SelectorKind::Global;
    std::size_t k = 1;
    std::size_t c = 1;
    std::size_t s1 = 24;
    std::size_t s2 = 168;
    std::size_t h = 1;

    void validate() const;
};

/// Training pairs (pattern, target) at strictly increasing time indices.
class TrainingSet {
public:
    TrainingSet() = default;

    /// Builds the set for query time t; every index must satisfy index <= t - h.
    static TrainingSet from_panel(const AlignedPanel& data, std::span<const TimeIndex> indices,
                                  TimeIndex t, std::size_t h);
    /// In-memory construction; indices become 1..N.
    static TrainingSet from_rows(const std::vector<std::vector<double>>& patterns,
                                 std::vector<double> targets);

    std::size_t size() const noexcept { return targets_.size(); }
    bool empty() const noexcept { return targets_.empty(); }
    std::size_t width() const noexcept { return width_; }
    std::span<const TimeIndex> indices() const noexcept { return indices_; }
    std::span<const double> targets() const noexcept { return targets_; }
    std::span<const double> patterns() const noexcept { return patterns_; }
    std::span<const double> pattern(std::size_t i) const { return {patterns_.data() + i * width_, width_}; }
    double target(std::size_t i) const { return targets_[i]; }

    /// Subset at positions (not time indices) given in ascending order.
    TrainingSet subset(std::span<const std::size_t> positions) const;

private:
    std::vector<TimeIndex> indices_;
    std::vector<double> patterns_;
    std::vector<double> targets_;
    std::size_t width_ = 0;
};

struct Interval {
    double low;
    double high;
    bool contains(double x) const noexcept { return x >= low && x <= high; }
};

/// Range spanned by the base forecasts of one query.
Interval z_interval(std::span<const double> query);

} // namespace metastack
