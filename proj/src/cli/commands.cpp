#include "metastack/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "metastack/io/csv.hpp"
#include "metastack/synth.hpp"

namespace metastack::cli {

namespace fs = std::filesystem;
using io::format_double;

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::SpecParseError:
    case ErrorKind::InvalidArgument: return 2;
    case ErrorKind::InvariantViolation: return 4;
    default: return 3;
    }
}

io::RunConfig resolve_config(const Options& options) {
    io::RunConfig base;
    base.experiment = options.profile == Profile::Full ? pipeline::ExperimentConfig::full()
                                                       : pipeline::ExperimentConfig::desk();
    if (options.config) {
        std::string text;
        try {
            text = io::read_text(*options.config);
        } catch (const Error& e) {
            fail(ErrorKind::ConfigError, e.what());
        }
        base = io::parse_run_config(text, options.config->string(), std::move(base));
    }
    if (options.seed) base.experiment.seed = *options.seed;
    return base;
}

namespace {

std::string metrics_row(std::string_view learner, std::string_view variant, const metrics::MetricsReport& m) {
    return std::string(learner) + "," + std::string(variant) + "," + format_double(m.mape) + "," +
           format_double(m.mdape) + "," + format_double(m.mse) + "," + format_double(m.mpe) + "," +
           format_double(m.stdpe) + "\n";
}

constexpr std::string_view kMetricsHeader = "learner,variant,mape,mdape,mse,mpe,stdpe\n";

std::string quote_label(const std::string& label) {
    return label.find(',') == std::string::npos ? label : "\"" + label + "\"";
}

} // namespace

Reports render_reports(const pipeline::RunResult& result, const io::RunConfig& config) {
    const auto& cfg = config.experiment;
    const std::size_t n_learners = result.learners.size();
    std::vector<std::string> names;
    for (auto l : result.learners) names.emplace_back(learners::to_string(l));
    Reports out;

    std::string metrics(kMetricsHeader);
    for (std::size_t l = 0; l < n_learners; ++l) {
        const bool per_series = cfg.selection == pipeline::SelectionScope::PerSeries;
        const std::string variant = per_series ? "per_series" : result.cells[result.chosen[l].front()].label();
        metrics += metrics_row(names[l], quote_label(variant), result.learner_metrics[l]);
    }
    out["metrics.csv"] = std::move(metrics);

    std::string cells(kMetricsHeader);
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        cells += metrics_row(learners::to_string(result.cells[c].learner), quote_label(result.cells[c].label()),
                             result.pooled[c]);
    }
    out["cells.csv"] = std::move(cells);

    std::string per_series = "series";
    for (const auto& n : names) per_series += "," + n;
    per_series += '\n';
    for (std::size_t s = 0; s < result.series.size(); ++s) {
        per_series += result.series[s];
        for (double v : result.per_series_mape[s]) per_series += "," + format_double(v);
        per_series += '\n';
    }
    out["per_series_mape.csv"] = std::move(per_series);

    // Row learner beats column learner on that many series.
    std::string dm = "learner";
    for (const auto& n : names) dm += "," + n;
    dm += '\n';
    for (std::size_t a = 0; a < n_learners; ++a) {
        dm += names[a];
        for (std::size_t b = 0; b < n_learners; ++b) {
            dm += ',';
            dm += a == b || !result.dm_available ? "NA" : std::to_string(result.dm_wins[a][b]);
        }
        dm += '\n';
    }
    out["dm_matrix.csv"] = std::move(dm);

    std::string ranking = "learner";
    for (std::size_t r = 1; r <= n_learners; ++r) ranking += ",rank_" + std::to_string(r);
    ranking += '\n';
    for (std::size_t l = 0; l < n_learners; ++l) {
        ranking += names[l];
        for (std::size_t r = 0; r < n_learners; ++r) {
            const std::size_t count = n_learners >= 2 ? result.ranking.tallies[l][r] : result.series.size();
            ranking += "," + std::to_string(count);
        }
        ranking += '\n';
    }
    out["ranking.csv"] = std::move(ranking);

    std::string extrapolation = "count";
    for (const auto& n : names) extrapolation += "," + n;
    extrapolation += '\n';
    const std::pair<const char*, std::size_t metrics::ExtrapolationCounts::*> rows[] = {
        {"n1", &metrics::ExtrapolationCounts::n1},
        {"n2", &metrics::ExtrapolationCounts::n2},
        {"n3", &metrics::ExtrapolationCounts::n3}};
    for (const auto& [label, field] : rows) {
        extrapolation += label;
        for (const auto& e : result.extrapolation) extrapolation += "," + std::to_string(e.*field);
        extrapolation += '\n';
    }
    out["extrapolation.csv"] = std::move(extrapolation);

    std::string forecasts = "series,t,timestamp,target,learner,variant,forecast\n";
    for (std::size_t s = 0; s < result.series.size(); ++s) {
        for (std::size_t p = 0; p < result.test_points[s].size(); ++p) {
            const std::string prefix = result.series[s] + "," + std::to_string(result.test_points[s][p]) + "," +
                                       io::format_timestamp(result.timestamps[s][p]) + "," + format_double(result.targets[s][p]) + ",";
            for (std::size_t c = 0; c < result.cells.size(); ++c) {
                forecasts += prefix + std::string(learners::to_string(result.cells[c].learner)) + "," +
                             quote_label(result.cells[c].label()) + "," +
                             format_double(result.by_cell[c][s].forecasts[p]) + "\n";
            }
        }
    }
    out["forecasts.csv"] = std::move(forecasts);

    std::string manifest = "# metastack " + std::string(kVersion) + "\n";
    manifest += "# seed " + std::to_string(cfg.seed) + "\n";
    manifest += "# series";
    for (const auto& s : result.series) manifest += " " + s;
    manifest += "\n# cells " + std::to_string(result.cells.size()) + "\n";
    manifest += std::string("# dm_test ") + (result.dm_available ? "yes" : "no (needs >= 2 learners and >= 10 test points)") + "\n";
    manifest += io::format_run_config(config);
    out["manifest.txt"] = std::move(manifest);
    return out;
}

ImportanceReport rank_importance(const AlignedPanel& data, const io::ImportanceOptions& options) {
    const auto y = data.series().values();
    ImportanceReport r;
    r.mrmr = importance::mrmr_scores(data.panel(), y, options.bins);
    r.rrelieff = importance::rrelieff_scores(data.panel(), y, options.neighbours, options.samples);
    std::stable_sort(r.rrelieff.begin(), r.rrelieff.end(), [](const auto& a, const auto& b) {
        return a.score > b.score || (a.score == b.score && a.model < b.model);
    });
    return r;
}

std::string render_importance_csv(const ImportanceReport& report) {
    std::string out = "rank,mrmr_model,mrmr_score,rrelieff_model,rrelieff_weight\n";
    for (std::size_t i = 0; i < report.mrmr.size(); ++i) {
        out += std::to_string(i + 1) + "," + report.mrmr[i].model + "," + format_double(report.mrmr[i].score) + "," +
               report.rrelieff[i].model + "," + format_double(report.rrelieff[i].score) + "\n";
    }
    return out;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string bar_panel(const std::vector<importance::FeatureScore>& scores, std::string_view heading, double x0,
                      double width, double row_height) {
    constexpr double label_width = 110.0;
    constexpr double top = 50.0;
    double hi = 0.0;
    double lo = 0.0;
    for (const auto& s : scores) {
        hi = std::max(hi, s.score);
        lo = std::min(lo, s.score);
    }
    const double span = hi - lo > 0.0 ? hi - lo : 1.0;
    const double plot = width - label_width - 60.0;
    const double zero = x0 + label_width + plot * (-lo / span);

    std::string out = "  <g>\n";
    out += "    <text x=\"" + fixed(x0 + width / 2, 1) + "\" y=\"32\" text-anchor=\"middle\" font-weight=\"bold\">" +
           xml_escape(heading) + "</text>\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double y = top + static_cast<double>(i) * row_height;
        const double len = plot * std::abs(scores[i].score) / span;
        const double bx = scores[i].score >= 0 ? zero : zero - len;
        out += "    <text x=\"" + fixed(x0 + label_width - 6, 1) + "\" y=\"" + fixed(y + row_height * 0.65, 1) +
               "\" text-anchor=\"end\">" + xml_escape(scores[i].model) + "</text>\n";
        out += "    <rect x=\"" + fixed(bx, 2) + "\" y=\"" + fixed(y + 2, 1) + "\" width=\"" + fixed(len, 2) +
               "\" height=\"" + fixed(row_height - 4, 1) + "\" fill=\"#4c72b0\"/>\n";
        out += "    <text x=\"" + fixed(std::max(bx + len, zero) + 4, 2) + "\" y=\"" +
               fixed(y + row_height * 0.65, 1) + "\" font-size=\"10\">" + fixed(scores[i].score, 4) + "</text>\n";
    }
    const double bottom = top + static_cast<double>(scores.size()) * row_height;
    out += "    <line x1=\"" + fixed(zero, 2) + "\" y1=\"" + fixed(top, 1) + "\" x2=\"" + fixed(zero, 2) + "\" y2=\"" +
           fixed(bottom, 1) + "\" stroke=\"black\"/>\n";
    out += "  </g>\n";
    return out;
}

} // namespace

std::string render_importance_svg(const ImportanceReport& report, std::string_view title) {
    constexpr double panel_width = 380.0;
    constexpr double row_height = 22.0;
    const double height = 70.0 + static_cast<double>(report.mrmr.size()) * row_height;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(2 * panel_width, 0) + "\" height=\"" +
           fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "  <title>" + xml_escape(title) + "</title>\n";
    out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "  <text x=\"" + fixed(panel_width, 1) + "\" y=\"14\" text-anchor=\"middle\">" + xml_escape(title) +
           "</text>\n";
    out += bar_panel(report.mrmr, "MRMR", 0.0, panel_width, row_height);
    out += bar_panel(report.rrelieff, "RReliefF", panel_width, panel_width, row_height);
    out += "</svg>\n";
    return out;
}

std::vector<fs::path> cmd_synth(const Options& options) {
    io::SynthPlan plan;
    if (options.config) {
        std::string text;
        try {
            text = io::read_text(*options.config);
        } catch (const Error& e) {
            fail(ErrorKind::SpecParseError, e.what());
        }
        plan = io::parse_synth_spec(text, options.config->string(), options.seed);
    } else {
        plan = io::default_synth_plan(options.seed);
    }

    std::vector<fs::path> written;
    for (std::size_t i = 0; i < plan.series.size(); ++i) {
        const auto& [name, spec] = plan.series[i];
        const SeriesFrame series = synth::gen_series(spec);
        const AlignedPanel panel = synth::gen_panel(series, plan.banks[i]);
        written.push_back(options.out / ("series_" + name + ".csv"));
        io::write_series_csv(written.back(), series);
        written.push_back(options.out / ("panel_" + name + ".csv"));
        io::write_panel_csv(written.back(), panel);
    }
    return written;
}

std::vector<fs::path> cmd_run(const Options& options) {
    const io::RunConfig config = resolve_config(options);
    auto panels = io::load_panels(options.data);
    std::vector<pipeline::SeriesInput> inputs;
    inputs.reserve(panels.size());
    for (auto& p : panels) inputs.push_back({std::move(p.name), std::move(p.data)});

    pipeline::RunOptions run;
    run.jobs = std::max<std::size_t>(1, options.jobs);
    const auto result = pipeline::run_experiment(inputs, config.experiment, run);

    std::vector<fs::path> written;
    for (const auto& [file, text] : render_reports(result, config)) {
        written.push_back(options.out / file);
        io::write_text(written.back(), text);
    }
    return written;
}

std::vector<fs::path> cmd_importance(const Options& options) {
    const io::RunConfig config = resolve_config(options);
    std::vector<fs::path> written;
    for (const auto& panel : io::load_panels(options.data)) {
        const auto report = rank_importance(panel.data, config.importance);
        written.push_back(options.out / ("importance_" + panel.name + ".csv"));
        io::write_text(written.back(), render_importance_csv(report));
        if (options.svg) {
            written.push_back(options.out / ("importance_" + panel.name + ".svg"));
            io::write_text(written.back(), render_importance_svg(report, "Importance scores: " + panel.name));
        }
    }
    return written;
}

} // namespace metastack::cli
