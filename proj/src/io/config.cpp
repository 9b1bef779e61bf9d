#include "metastack/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "metastack/io/csv.hpp"

namespace metastack::io {

using pipeline::ExperimentConfig;
using pipeline::kAllHistory;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> out;
    for (auto item : split_fields(value)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_unsigned(std::string_view text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

double parse_real(std::string_view text) {
    try {
        return parse_double(text);
    } catch (const Error&) {
        throw std::invalid_argument("expected a number, got '" + std::string(text) + "'");
    }
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view value, F item) {
    std::vector<T> out;
    for (auto s : split_list(value)) out.push_back(item(s));
    if (out.empty()) throw std::invalid_argument("list must not be empty");
    return out;
}

std::size_t parse_neighbour(std::string_view s) {
    if (s == "all") return kAllHistory;
    const auto k = parse_unsigned<std::size_t>(s);
    if (k == 0) throw std::invalid_argument("neighbour counts must be >= 1 (use 'all' for the whole history)");
    return k;
}

learners::LearnerKind parse_learner_name(std::string_view s) {
    if (auto k = learners::parse_learner(s)) return *k;
    throw std::invalid_argument("unknown learner '" + std::string(s) + "'");
}

pipeline::LstmVariant parse_variant(std::string_view s) {
    if (s == "v1") return pipeline::LstmVariant::V1;
    if (s == "v2") return pipeline::LstmVariant::V2;
    if (s == "v3") return pipeline::LstmVariant::V3;
    throw std::invalid_argument("unknown LSTM variant '" + std::string(s) + "'");
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F format) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += format(items[i]);
    }
    return out;
}

std::string neighbour_text(std::size_t k) { return k == kAllHistory ? "all" : std::to_string(k); }

struct Field {
    std::string_view section;
    std::string_view key;
    std::function<void(RunConfig&, std::string_view)> set;
};

const std::vector<Field>& run_fields() {
    static const std::vector<Field> fields = {
        {"experiment", "horizon", [](RunConfig& c, auto v) { c.experiment.horizon = parse_unsigned<std::size_t>(v); }},
        {"experiment", "test_point_count",
         [](RunConfig& c, auto v) { c.experiment.test_point_count = parse_unsigned<std::size_t>(v); }},
        {"experiment", "seed", [](RunConfig& c, auto v) { c.experiment.seed = parse_unsigned<std::uint64_t>(v); }},
        {"experiment", "learners",
         [](RunConfig& c, auto v) { c.experiment.learners = parse_list<learners::LearnerKind>(v, parse_learner_name); }},
        {"experiment", "selection",
         [](RunConfig& c, auto v) {
             if (v == "global") c.experiment.selection = pipeline::SelectionScope::Global;
             else if (v == "per_series") c.experiment.selection = pipeline::SelectionScope::PerSeries;
             else throw std::invalid_argument("expected 'global' or 'per_series'");
         }},
        {"experiment", "selection_metric",
         [](RunConfig& c, auto v) {
             if (v == "mape") c.experiment.selection_metric = pipeline::SelectionMetric::Mape;
             else if (v == "mdape") c.experiment.selection_metric = pipeline::SelectionMetric::Mdape;
             else if (v == "mse") c.experiment.selection_metric = pipeline::SelectionMetric::Mse;
             else throw std::invalid_argument("expected 'mape', 'mdape' or 'mse'");
         }},
        {"grids", "neighbours",
         [](RunConfig& c, auto v) { c.experiment.neighbours = parse_list<std::size_t>(v, parse_neighbour); }},
        {"grids", "windows",
         [](RunConfig& c, auto v) {
             c.experiment.windows = parse_list<std::size_t>(v, parse_unsigned<std::size_t>);
         }},
        {"grids", "bandwidths", [](RunConfig& c, auto v) { c.experiment.bandwidths = parse_list<double>(v, parse_real); }},
        {"grids", "mlp_nodes",
         [](RunConfig& c, auto v) {
             c.experiment.mlp_nodes = parse_list<std::size_t>(v, parse_unsigned<std::size_t>);
         }},
        {"mlp", "mlp_epochs", [](RunConfig& c, auto v) { c.experiment.mlp_epochs = parse_unsigned<std::size_t>(v); }},
        {"mlp", "mlp_alpha", [](RunConfig& c, auto v) { c.experiment.mlp_alpha = parse_real(v); }},
        {"rf", "rf_trees", [](RunConfig& c, auto v) { c.experiment.rf_trees = parse_unsigned<std::size_t>(v); }},
        {"rf", "rf_min_leaf", [](RunConfig& c, auto v) { c.experiment.rf_min_leaf = parse_unsigned<std::size_t>(v); }},
        {"rf", "rf_features", [](RunConfig& c, auto v) { c.experiment.rf_features = parse_unsigned<std::size_t>(v); }},
        {"lstm", "lstm_hidden", [](RunConfig& c, auto v) { c.experiment.lstm_hidden = parse_unsigned<std::size_t>(v); }},
        {"lstm", "lstm_epochs", [](RunConfig& c, auto v) { c.experiment.lstm_epochs = parse_unsigned<std::size_t>(v); }},
        {"lstm", "lstm_variants",
         [](RunConfig& c, auto v) { c.experiment.lstm_variants = parse_list<pipeline::LstmVariant>(v, parse_variant); }},
        {"lstm", "s1", [](RunConfig& c, auto v) { c.experiment.s1 = parse_unsigned<std::size_t>(v); }},
        {"lstm", "s2", [](RunConfig& c, auto v) { c.experiment.s2 = parse_unsigned<std::size_t>(v); }},
        {"importance", "importance_bins",
         [](RunConfig& c, auto v) {
             const auto b = parse_unsigned<int>(v);
             if (b < 2) throw std::invalid_argument("at least two bins are required");
             c.importance.bins = b;
         }},
        {"importance", "importance_neighbours",
         [](RunConfig& c, auto v) { c.importance.neighbours = parse_unsigned<std::size_t>(v); }},
        {"importance", "importance_samples",
         [](RunConfig& c, auto v) { c.importance.samples = parse_unsigned<std::size_t>(v); }},
    };
    return fields;
}

[[noreturn]] void entry_error(ErrorKind kind, std::string_view source, const IniEntry& e, const std::string& what) {
    fail(kind, std::string(source) + ":" + std::to_string(e.line) + ": key '" + e.key + "': " + what);
}

} // namespace

std::vector<IniEntry> parse_ini(std::string_view text, std::string_view source, ErrorKind kind) {
    std::vector<IniEntry> out;
    std::string section;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t end = std::min(text.find('\n', begin), text.size());
        const auto line = trim(text.substr(begin, end - begin));
        begin = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') fail(kind, where + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) fail(kind, where + "empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) fail(kind, where + "expected 'key = value', got '" + std::string(line) + "'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) fail(kind, where + "missing key before '='");
        out.push_back({section, std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return out;
}

RunConfig parse_run_config(std::string_view text, std::string_view source, RunConfig base) {
    const auto& fields = run_fields();
    std::set<std::string> seen;
    for (const auto& entry : parse_ini(text, source, ErrorKind::ConfigError)) {
        const bool known_section =
            entry.section.empty() ||
            std::any_of(fields.begin(), fields.end(), [&](const Field& f) { return f.section == entry.section; });
        if (!known_section) {
            fail(ErrorKind::ConfigError, std::string(source) + ":" + std::to_string(entry.line) +
                                             ": unknown section [" + entry.section + "]");
        }
        const auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.key == entry.key; });
        if (it == fields.end()) entry_error(ErrorKind::ConfigError, source, entry, "unknown key");
        if (!entry.section.empty() && it->section != entry.section)
            entry_error(ErrorKind::ConfigError, source, entry, "belongs in [" + std::string(it->section) + "]");
        if (!seen.insert(entry.key).second) entry_error(ErrorKind::ConfigError, source, entry, "given twice");
        try {
            it->set(base, entry.value);
        } catch (const std::invalid_argument& e) {
            entry_error(ErrorKind::ConfigError, source, entry, e.what());
        }
    }
    try {
        base.experiment.validate();
    } catch (const Error& e) {
        fail(ErrorKind::ConfigError, std::string(source) + ": " + e.what());
    }
    return base;
}

std::string format_run_config(const RunConfig& config) {
    const ExperimentConfig& e = config.experiment;
    auto num = [](auto v) { return std::to_string(v); };
    std::string out;
    out += "[experiment]\n";
    out += "horizon = " + num(e.horizon) + "\n";
    out += "test_point_count = " + num(e.test_point_count) + "\n";
    out += "seed = " + num(e.seed) + "\n";
    out += "learners = " + join(e.learners, [](auto l) { return std::string(learners::to_string(l)); }) + "\n";
    out += std::string("selection = ") +
           (e.selection == pipeline::SelectionScope::Global ? "global" : "per_series") + "\n";
    out += std::string("selection_metric = ") +
           (e.selection_metric == pipeline::SelectionMetric::Mape    ? "mape"
            : e.selection_metric == pipeline::SelectionMetric::Mdape ? "mdape"
                                                                      : "mse") +
           "\n";
    out += "\n[grids]\n";
    out += "neighbours = " + join(e.neighbours, neighbour_text) + "\n";
    out += "windows = " + join(e.windows, num) + "\n";
    out += "bandwidths = " + join(e.bandwidths, format_double) + "\n";
    out += "mlp_nodes = " + join(e.mlp_nodes, num) + "\n";
    out += "\n[mlp]\n";
    out += "mlp_epochs = " + num(e.mlp_epochs) + "\n";
    out += "mlp_alpha = " + format_double(e.mlp_alpha) + "\n";
    out += "\n[rf]\n";
    out += "rf_trees = " + num(e.rf_trees) + "\n";
    out += "rf_min_leaf = " + num(e.rf_min_leaf) + "\n";
    out += "rf_features = " + num(e.rf_features) + "\n";
    out += "\n[lstm]\n";
    out += "lstm_hidden = " + num(e.lstm_hidden) + "\n";
    out += "lstm_epochs = " + num(e.lstm_epochs) + "\n";
    out += "lstm_variants = " + join(e.lstm_variants, [](auto v) { return std::string(pipeline::to_string(v)); }) + "\n";
    out += "s1 = " + num(e.s1) + "\n";
    out += "s2 = " + num(e.s2) + "\n";
    out += "\n[importance]\n";
    out += "importance_bins = " + num(config.importance.bins) + "\n";
    out += "importance_neighbours = " + num(config.importance.neighbours) + "\n";
    out += "importance_samples = " + num(config.importance.samples) + "\n";
    return out;
}

namespace {

struct SynthSettings {
    std::size_t count = 1;
    std::string name = "synth";
    synth::SynthSpec spec;
};

synth::BaseModelKind parse_kind(std::string_view s) {
    for (auto k : {synth::BaseModelKind::SeasonalNaive24, synth::BaseModelKind::SeasonalNaive168,
                   synth::BaseModelKind::MovingAverage, synth::BaseModelKind::NoisyOracle}) {
        if (synth::to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown model kind '" + std::string(s) + "'");
}

bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
               ch == '-';
    });
}

SynthPlan expand(const SynthSettings& settings, const std::vector<synth::BaseModelSpec>& custom) {
    SynthPlan plan;
    for (std::size_t i = 0; i < settings.count; ++i) {
        synth::SynthSpec spec = settings.spec;
        spec.seed += i;
        std::string name = settings.name;
        if (settings.count > 1) {
            const std::string digits = std::to_string(i + 1);
            name += std::string(digits.size() < 2 ? 2 - digits.size() : 0, '0') + digits;
        }
        synth::BaseBankSpec bank;
        if (custom.empty()) {
            bank = synth::BaseBankSpec::defaults(spec.level, spec.seed);
        } else {
            bank.models = custom;
            for (auto& m : bank.models) m.seed += i;
        }
        plan.series.emplace_back(std::move(name), spec);
        plan.banks.push_back(std::move(bank));
    }
    return plan;
}

} // namespace

SynthPlan default_synth_plan(std::optional<std::uint64_t> seed) {
    SynthSettings settings;
    if (seed) settings.spec.seed = *seed;
    return expand(settings, {});
}

SynthPlan parse_synth_spec(std::string_view text, std::string_view source, std::optional<std::uint64_t> seed) {
    constexpr ErrorKind kind = ErrorKind::SpecParseError;
    SynthSettings settings;
    std::vector<synth::BaseModelSpec> custom;
    std::set<std::pair<std::string, std::string>> seen;

    using SynthSetter = std::function<void(SynthSettings&, std::string_view)>;
    const std::map<std::string_view, SynthSetter> synth_keys = {
        {"series",
         [](SynthSettings& s, auto v) {
             s.count = parse_unsigned<std::size_t>(v);
             if (s.count == 0) throw std::invalid_argument("at least one series is required");
         }},
        {"name",
         [](SynthSettings& s, auto v) {
             if (!valid_name(v)) throw std::invalid_argument("names use letters, digits, '_' and '-'");
             s.name = std::string(v);
         }},
        {"length", [](SynthSettings& s, auto v) { s.spec.length = parse_unsigned<std::size_t>(v); }},
        {"level", [](SynthSettings& s, auto v) { s.spec.level = parse_real(v); }},
        {"daily_amp", [](SynthSettings& s, auto v) { s.spec.daily_amp = parse_real(v); }},
        {"weekly_amp", [](SynthSettings& s, auto v) { s.spec.weekly_amp = parse_real(v); }},
        {"yearly_amp", [](SynthSettings& s, auto v) { s.spec.yearly_amp = parse_real(v); }},
        {"noise_sd", [](SynthSettings& s, auto v) { s.spec.noise_sd = parse_real(v); }},
        {"seed", [](SynthSettings& s, auto v) { s.spec.seed = parse_unsigned<std::uint64_t>(v); }},
        {"start",
         [](SynthSettings& s, auto v) {
             try {
                 s.spec.start = parse_timestamp(v);
             } catch (const Error& e) {
                 throw std::invalid_argument(e.what());
             }
         }},
    };
    using ModelSetter = std::function<void(synth::BaseModelSpec&, std::string_view)>;
    const std::map<std::string_view, ModelSetter> model_keys = {
        {"kind", [](synth::BaseModelSpec& m, auto v) { m.kind = parse_kind(v); }},
        {"bias", [](synth::BaseModelSpec& m, auto v) { m.bias = parse_real(v); }},
        {"noise_sd", [](synth::BaseModelSpec& m, auto v) { m.noise_sd = parse_real(v); }},
        {"seed", [](synth::BaseModelSpec& m, auto v) { m.seed = parse_unsigned<std::uint64_t>(v); }},
    };

    for (const auto& entry : parse_ini(text, source, kind)) {
        if (!seen.insert({entry.section, entry.key}).second) entry_error(kind, source, entry, "given twice");
        try {
            if (entry.section.empty() || entry.section == "synth") {
                const auto it = synth_keys.find(entry.key);
                if (it == synth_keys.end()) entry_error(kind, source, entry, "unknown key");
                it->second(settings, entry.value);
            } else if (entry.section.starts_with("model ")) {
                const std::string name(trim(std::string_view(entry.section).substr(6)));
                if (!valid_name(name))
                    entry_error(kind, source, entry, "model names use letters, digits, '_' and '-'");
                auto model = std::find_if(custom.begin(), custom.end(), [&](const auto& m) { return m.name == name; });
                if (model == custom.end()) {
                    custom.push_back({name, synth::BaseModelKind::NoisyOracle, 0.0, 0.0, 0});
                    model = custom.end() - 1;
                }
                const auto it = model_keys.find(entry.key);
                if (it == model_keys.end()) entry_error(kind, source, entry, "unknown key");
                it->second(*model, entry.value);
            } else {
                fail(kind, std::string(source) + ":" + std::to_string(entry.line) + ": unknown section [" +
                               entry.section + "]");
            }
        } catch (const std::invalid_argument& e) {
            entry_error(kind, source, entry, e.what());
        }
    }
    if (seed) settings.spec.seed = *seed;
    auto plan = expand(settings, custom);
    try {
        for (std::size_t i = 0; i < plan.series.size(); ++i) {
            plan.series[i].second.validate();
            plan.banks[i].validate();
        }
    } catch (const Error& e) {
        fail(kind, std::string(source) + ": " + e.what());
    }
    return plan;
}

} // namespace metastack::io
