#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::synth {

/// Hours consumed as lag history before the first panel row (longest lag).
inline constexpr std::size_t kWarmupHours = 168;

/// Triple-seasonal hourly load: daily, weekly and yearly sinusoids plus noise.
struct SynthSpec {
    std::size_t length = 26 * 168;
    double level = 1000.0;
    double daily_amp = 150.0;
    double weekly_amp = 80.0;
    double yearly_amp = 200.0;
    double noise_sd = 15.0;
    std::uint64_t seed = 1;
    Timestamp start = Timestamp{std::chrono::sys_days{std::chrono::year{2018} / 1 / 1}};

    void validate() const;
};

enum class BaseModelKind { SeasonalNaive24, SeasonalNaive168, MovingAverage, NoisyOracle };

struct BaseModelSpec {
    std::string name;
    BaseModelKind kind = BaseModelKind::NoisyOracle;
    double bias = 0.0;      ///< additive offset, target units (noisy oracle only)
    double noise_sd = 0.0;  ///< noisy oracle only
    std::uint64_t seed = 0;
};

struct BaseBankSpec {
    std::vector<BaseModelSpec> models;

    /// Two seasonal naives, a 24h moving average and five noisy oracles with
    /// biases {-3,-1,0,1,3}% and noise {1..5}% of `level`.
    static BaseBankSpec defaults(double level, std::uint64_t seed);
    void validate() const;
};

std::string_view to_string(BaseModelKind kind) noexcept;

SeriesFrame gen_series(const SynthSpec& spec);

/// Panel aligned with the series after the warm-up hours: row r of the result
/// corresponds to hour kWarmupHours + r of `series`. Throws SeriesTooShort.
AlignedPanel gen_panel(const SeriesFrame& series, const BaseBankSpec& bank);

} // namespace metastack::synth
