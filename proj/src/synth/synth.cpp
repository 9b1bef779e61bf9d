#include "metastack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace metastack::synth {

void SynthSpec::validate() const {
    require(length >= 2 * kWarmupHours, ErrorKind::InvalidArgument, "synthetic series needs at least two weeks");
    require(daily_amp >= 0 && weekly_amp >= 0 && yearly_amp >= 0, ErrorKind::InvalidArgument,
            "seasonal amplitudes must be non-negative");
    require(noise_sd >= 0, ErrorKind::InvalidArgument, "noise_sd must be non-negative");
    require(level > 0, ErrorKind::InvalidArgument, "level must be positive");
}

BaseBankSpec BaseBankSpec::defaults(double level, std::uint64_t seed) {
    BaseBankSpec bank;
    bank.models.push_back({"snaive24", BaseModelKind::SeasonalNaive24, 0.0, 0.0, seed});
    bank.models.push_back({"snaive168", BaseModelKind::SeasonalNaive168, 0.0, 0.0, seed});
    bank.models.push_back({"ma24", BaseModelKind::MovingAverage, 0.0, 0.0, seed});
    const double bias_pct[] = {-3.0, -1.0, 0.0, 1.0, 3.0};
    for (int i = 0; i < 5; ++i) {
        bank.models.push_back({"oracle" + std::to_string(i + 1), BaseModelKind::NoisyOracle,
                               bias_pct[i] / 100.0 * level, (i + 1) / 100.0 * level,
                               seed + 1000003ULL * static_cast<std::uint64_t>(i + 1)});
    }
    return bank;
}

void BaseBankSpec::validate() const {
    require(models.size() >= 2, ErrorKind::InvalidArgument, "base bank needs at least two models");
    std::set<std::string> names;
    for (const auto& m : models) {
        require(names.insert(m.name).second, ErrorKind::InvalidArgument, "duplicate base model name '" + m.name + "'");
        require(m.noise_sd >= 0, ErrorKind::InvalidArgument, "noise_sd of '" + m.name + "' must be non-negative");
    }
}

std::string_view to_string(BaseModelKind kind) noexcept {
    switch (kind) {
    case BaseModelKind::SeasonalNaive24: return "seasonal_naive_24";
    case BaseModelKind::SeasonalNaive168: return "seasonal_naive_168";
    case BaseModelKind::MovingAverage: return "moving_average";
    case BaseModelKind::NoisyOracle: return "noisy_oracle";
    }
    return "unknown";
}

SeriesFrame gen_series(const SynthSpec& spec) {
    spec.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double floor_value = 0.01 * spec.level;

    std::vector<Timestamp> stamps(spec.length);
    std::vector<double> values(spec.length);
    for (std::size_t i = 0; i < spec.length; ++i) {
        const double t = static_cast<double>(i + 1);
        double y = spec.level + spec.daily_amp * std::sin(two_pi * t / 24.0) +
                   spec.weekly_amp * std::sin(two_pi * t / 168.0) + spec.yearly_amp * std::sin(two_pi * t / 8760.0);
        if (spec.noise_sd > 0) y += spec.noise_sd * noise(rng);
        values[i] = std::max(y, floor_value);
        stamps[i] = spec.start + std::chrono::hours{static_cast<long>(i)};
    }
    return SeriesFrame(std::move(stamps), std::move(values));
}

AlignedPanel gen_panel(const SeriesFrame& series, const BaseBankSpec& bank) {
    bank.validate();
    require(series.size() > kWarmupHours, ErrorKind::SeriesTooShort,
            "series of " + std::to_string(series.size()) + " hours is too short for a " +
                std::to_string(kWarmupHours) + "-hour lag");
    const auto y = series.values();
    const std::size_t rows = series.size() - kWarmupHours;
    const std::size_t n = bank.models.size();

    std::vector<double> data(rows * n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& model = bank.models[j];
        std::mt19937_64 rng(model.seed);
        std::normal_distribution<double> noise(0.0, 1.0);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t i = r + kWarmupHours;  // 0-based hour in the series
            double f = 0.0;
            switch (model.kind) {
            case BaseModelKind::SeasonalNaive24: f = y[i - 24]; break;
            case BaseModelKind::SeasonalNaive168: f = y[i - 168]; break;
            case BaseModelKind::MovingAverage: {
                double sum = 0.0;
                for (std::size_t l = 1; l <= 24; ++l) sum += y[i - l];
                f = sum / 24.0;
                break;
            }
            case BaseModelKind::NoisyOracle:
                f = y[i] + model.bias;
                if (model.noise_sd > 0) f += model.noise_sd * noise(rng);
                break;
            }
            data[r * n + j] = f;
        }
    }

    const auto stamps = series.timestamps();
    std::vector<Timestamp> kept(stamps.begin() + kWarmupHours, stamps.end());
    std::vector<double> targets(y.begin() + kWarmupHours, y.end());
    std::vector<std::string> names;
    names.reserve(n);
    for (const auto& m : bank.models) names.push_back(m.name);

    return align_panel(SeriesFrame(kept, std::move(targets)), ForecastPanel(kept, std::move(names), std::move(data)));
}

} // namespace metastack::synth
