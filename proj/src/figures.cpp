#include "stakelab/figures.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "stakelab/ensemble.hpp"
#include "stakelab/io.hpp"
#include "stakelab/limit_laws.hpp"
#include "stakelab/moments.hpp"
#include "stakelab/rng.hpp"
#include "stakelab/stats.hpp"

namespace stakelab {

namespace {

std::vector<double> arange(double lo, double hi, double step) {
    std::vector<double> out;
    for (double x = lo; x <= hi + 1e-9; x += step) out.push_back(x);
    return out;
}

enum class FigKind { PmaxCurve, VarCurve, RatioHistogram, ShareHistogram };

struct FigSpec {
    std::string name;
    FigKind kind;
    nlohmann::json schedule;
    std::vector<double> n_grid;       // or {N} for histograms
    StakeRule n0_rule;                // n0(N)
    double eps = 0.0;                 // pmax band, or deviation threshold for var curves
    std::int64_t T = 50000;
    std::int64_t replicates = 2000;
    std::vector<double> pi0_grid;     // ShareHistogram only
    bool emit_p_lt = false;           // poor-get-poorer curves
    bool emit_p_dev = false;          // P(|ratio-1| > eps)
};

const std::vector<FigSpec>& figure_table() {
    static const std::vector<FigSpec> table = [] {
        std::vector<FigSpec> t;
        auto constant1 = nlohmann::json{{"kind", "constant"}, {"R", 1.0}};
        auto floor999 =
            nlohmann::json{{"kind", "floor_decay"}, {"floor", 1.0}, {"excess", 1.0}, {"q", 0.999}};
        auto power06 = nlohmann::json{{"kind", "power_decay"}, {"c", 1.0}, {"alpha", 0.6}};
        auto power01 = nlohmann::json{{"kind", "power_decay"}, {"c", 1.0}, {"alpha", 0.1}};
        auto prop_geo = nlohmann::json{{"kind", "proportional"}, {"rho", 0.001}, {"gamma", 1.1}};
        auto prop_sub = nlohmann::json{{"kind", "proportional"}, {"rho", 1.0}, {"gamma", 0.1}};

        t.push_back({"fig1", FigKind::PmaxCurve, constant1, arange(1000, 10000, 500),
                     StakeRule{0.5, 1.0}, 0.05});
        t.push_back({"fig2a", FigKind::RatioHistogram, constant1, {100.0}, StakeRule{1.0, 0.0},
                     0.0, 50000, 10000});
        {
            FigSpec f{"fig2b", FigKind::VarCurve, constant1, arange(100, 300, 10),
                      StakeRule{1.0, -1.1}, 0.05};
            f.emit_p_lt = true;
            t.push_back(f);
        }
        t.push_back({"fig3", FigKind::PmaxCurve, floor999, arange(1700, 10700, 500),
                     StakeRule{0.5, 1.0}, 0.05});
        {
            FigSpec f{"fig4a", FigKind::VarCurve, floor999, arange(100, 200, 10),
                      StakeRule{1.0, 0.0}, 0.5};
            f.emit_p_dev = true;
            t.push_back(f);
        }
        t.push_back({"fig4b", FigKind::VarCurve, floor999, arange(100, 300, 10),
                     StakeRule{1.0, -1.1}, 0.0});
        t.push_back({"fig5", FigKind::PmaxCurve, power06, arange(2000, 11000, 500),
                     StakeRule{1.0, 0.0}, 0.05});
        t.push_back({"fig6a", FigKind::VarCurve, power06, arange(100, 200, 10),
                     StakeRule{1.0, -1.0}, 0.0});
        t.push_back({"fig6b", FigKind::VarCurve, power06, arange(50, 150, 5),
                     StakeRule{1.0, -2.0}, 0.0});
        t.push_back({"fig7", FigKind::PmaxCurve, power01, arange(2000, 11000, 500),
                     StakeRule{1.0, 0.0}, 0.25});
        {
            FigSpec f{"fig8a", FigKind::VarCurve, power01, arange(100, 200, 10),
                      StakeRule{1.0, -1.0 / 9.0}, 0.5};
            f.emit_p_dev = true;
            t.push_back(f);
        }
        t.push_back({"fig8b", FigKind::VarCurve, power01, arange(50, 150, 5),
                     StakeRule{1.0, -1.0}, 0.0});
        {
            FigSpec f{"fig9", FigKind::ShareHistogram, prop_geo, {1000.0}, StakeRule{}, 0.0, 5000,
                      10000};
            f.pi0_grid = {0.5, 0.25, 0.125};
            t.push_back(f);
        }
        t.push_back({"fig10", FigKind::PmaxCurve, prop_sub, arange(2000, 11000, 500),
                     StakeRule{0.5, 1.0}, 0.05});
        {
            FigSpec f{"fig11a", FigKind::VarCurve, prop_sub, arange(100, 200, 10),
                      StakeRule{1.0, 0.5}, 0.5};
            f.emit_p_dev = true;
            t.push_back(f);
        }
        t.push_back({"fig11b", FigKind::VarCurve, prop_sub, arange(100, 300, 10),
                     StakeRule{1.0, 0.01}, 0.0});
        return t;
    }();
    return table;
}

nlohmann::json resolved_config(const FigSpec& f, const std::vector<double>& grid,
                               std::int64_t reps, std::uint64_t seed) {
    nlohmann::json c;
    c["figure"] = f.name;
    c["schedule"] = f.schedule;
    c["N_grid"] = grid;
    c["n0_rule"] = {{"coeff", f.n0_rule.coeff}, {"exponent", f.n0_rule.exponent}};
    c["epsilon"] = f.eps;
    c["T"] = f.T;
    c["replicates"] = reps;
    c["master_seed"] = seed;
    if (!f.pi0_grid.empty()) c["pi0_grid"] = f.pi0_grid;
    return c;
}

}  // namespace

std::vector<double> thin_grid(const std::vector<double>& grid, double scale) {
    if (scale >= 1.0 || grid.size() <= 2) return grid;
    auto keep = static_cast<std::size_t>(std::lround(scale * static_cast<double>(grid.size())));
    if (keep < 2) keep = 2;
    std::vector<double> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        std::size_t idx = i * (grid.size() - 1) / (keep - 1);
        out.push_back(grid[idx]);
    }
    return out;
}

std::int64_t scale_replicates(std::int64_t replicates, double scale) {
    if (scale >= 1.0) return replicates;
    auto r = static_cast<std::int64_t>(std::llround(scale * static_cast<double>(replicates)));
    return std::max<std::int64_t>(r, 16);
}

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& f : figure_table()) n.push_back(f.name);
        return n;
    }();
    return names;
}

FigureResult run_figure(const std::string& name, const FigureOverrides& o) {
    const FigSpec* spec = nullptr;
    for (const auto& f : figure_table())
        if (f.name == name) spec = &f;
    if (!spec) throw UnknownFigure(name);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> grid = thin_grid(spec->n_grid, o.scale);
    std::int64_t reps = o.replicates ? *o.replicates : scale_replicates(spec->replicates, o.scale);

    std::filesystem::create_directories(o.out_dir);
    auto path = [&](const std::string& leaf) {
        return (std::filesystem::path(o.out_dir) / leaf).string();
    };

    FigureResult result;
    result.name = spec->name;
    result.config = resolved_config(*spec, grid, reps, o.seed);

    RewardSchedule sched = schedule_from_json(spec->schedule);
    std::uint64_t cell = 0;

    if (spec->kind == FigKind::PmaxCurve) {
        std::string csv = path(spec->name + ".csv");
        CsvWriter w(csv);
        ConcentrationBound probe = concentration_bound(sched, grid.front(),
                                                       spec->n0_rule(grid.front()), spec->eps);
        const bool explicit_bound = probe.value.has_value();
        w.header(explicit_bound ? std::vector<std::string>{"N", "p_max", "bound"}
                                : std::vector<std::string>{"N", "p_max", "bound_scale"});
        for (double N : grid) {
            TrackedEnsembleConfig cfg;
            cfg.schedule = sched;
            cfg.N = N;
            cfg.n0 = spec->n0_rule(N);
            cfg.T = spec->T;
            cfg.replicates = reps;
            cfg.epsilon = spec->eps;
            cfg.keep_terminal = false;
            EnsembleSummary sum = run_tracked_ensemble(cfg, derive_seed(o.seed, cell++));
            double pmax = estimate_pmax(sum, spec->eps);
            ConcentrationBound b = concentration_bound(sched, N, cfg.n0, spec->eps);
            double bound_col = explicit_bound ? *b.value : 1.0 / b.scaling_denominator;
            w.row({CsvWriter::cell(N), CsvWriter::cell(pmax), CsvWriter::cell(bound_col)});
        }
        result.outputs.push_back(csv);
    } else if (spec->kind == FigKind::VarCurve) {
        std::string csv = path(spec->name + ".csv");
        CsvWriter w(csv);
        std::vector<std::string> cols{"N", "var_ratio", "se_var_proxy"};
        if (spec->emit_p_lt) {
            cols.push_back("p_ratio_gt_eps");
            cols.push_back("p_ratio_lt_eps");
        }
        if (spec->emit_p_dev) cols.push_back("p_dev_gt_eps");
        w.header(cols);
        for (double N : grid) {
            TrackedEnsembleConfig cfg;
            cfg.schedule = sched;
            cfg.N = N;
            cfg.n0 = spec->n0_rule(N);
            cfg.T = spec->T;
            cfg.replicates = reps;
            EnsembleSummary sum = run_tracked_ensemble(cfg, derive_seed(o.seed, cell++));
            MeanVar mv = mean_var(sum.terminal_ratios);
            std::vector<std::string> row{CsvWriter::cell(N), CsvWriter::cell(mv.var),
                                         CsvWriter::cell(mv.se)};
            if (spec->emit_p_lt) {
                std::int64_t gt = 0, lt = 0;
                for (double r : sum.terminal_ratios) {
                    gt += r > spec->eps;
                    lt += r < spec->eps;
                }
                row.push_back(CsvWriter::cell(static_cast<double>(gt) / static_cast<double>(reps)));
                row.push_back(CsvWriter::cell(static_cast<double>(lt) / static_cast<double>(reps)));
            }
            if (spec->emit_p_dev) {
                std::int64_t dev = 0;
                for (double r : sum.terminal_ratios) dev += std::fabs(r - 1.0) > spec->eps;
                row.push_back(CsvWriter::cell(static_cast<double>(dev) / static_cast<double>(reps)));
            }
            w.row(row);
        }
        result.outputs.push_back(csv);
    } else if (spec->kind == FigKind::RatioHistogram) {
        TrackedEnsembleConfig cfg;
        cfg.schedule = sched;
        cfg.N = grid.front();
        cfg.n0 = spec->n0_rule(cfg.N);
        cfg.T = spec->T;
        cfg.replicates = reps;
        EnsembleSummary sum = run_tracked_ensemble(cfg, derive_seed(o.seed, cell++));

        // Gamma(1) overlay: the medium-investor ratio limit for n0 = R.
        Histogram h = make_histogram(sum.terminal_ratios, 0.0, 8.0, 80);
        std::string csv = path(spec->name + ".csv");
        CsvWriter w(csv);
        w.header({"bin_lo", "bin_hi", "mass", "density", "gamma_pdf"});
        double bw = (h.hi - h.lo) / static_cast<double>(h.counts.size());
        GammaRatio overlay{cfg.n0 / 1.0, 1.0 / cfg.n0};
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            double lo = h.lo + bw * static_cast<double>(b);
            double mid = lo + 0.5 * bw;
            w.row({CsvWriter::cell(lo), CsvWriter::cell(lo + bw), CsvWriter::cell(h.mass(b)),
                   CsvWriter::cell(h.mass(b) / bw), CsvWriter::cell(gamma_ratio_pdf(overlay, mid))});
        }
        result.outputs.push_back(csv);

        double ks = ks_distance(sum.terminal_ratios,
                                [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); });
        std::int64_t doubled = 0;
        for (double r : sum.terminal_ratios) doubled += r > 2.0;
        std::string scsv = path(spec->name + "_summary.csv");
        CsvWriter sw(scsv);
        sw.header({"N", "ks_to_gamma", "p_ratio_gt_2"});
        sw.row({CsvWriter::cell(cfg.N), CsvWriter::cell(ks),
                CsvWriter::cell(static_cast<double>(doubled) / static_cast<double>(reps))});
        result.outputs.push_back(scsv);
    } else {  // ShareHistogram (fig9)
        std::string csv = path(spec->name + ".csv");
        CsvWriter w(csv);
        w.header({"pi0", "bin_lo", "bin_hi", "mass"});
        std::string scsv = path(spec->name + "_summary.csv");
        CsvWriter sw(scsv);
        sw.header({"pi0", "frac_below_001", "frac_above_099", "frac_mid"});
        for (double pi0 : spec->pi0_grid) {
            TrackedEnsembleConfig cfg;
            cfg.schedule = sched;
            cfg.N = grid.front();
            cfg.n0 = pi0 * grid.front();
            cfg.T = spec->T;
            cfg.replicates = reps;
            EnsembleSummary sum = run_tracked_ensemble(cfg, derive_seed(o.seed, cell++));
            Histogram h = make_histogram(sum.terminal_shares, 0.0, 1.0, 100);
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                double lo = h.lo + 0.01 * static_cast<double>(b);
                w.row({CsvWriter::cell(pi0), CsvWriter::cell(lo), CsvWriter::cell(lo + 0.01),
                       CsvWriter::cell(h.mass(b))});
            }
            std::int64_t lo_n = 0, hi_n = 0;
            for (double sh : sum.terminal_shares) {
                lo_n += sh < 0.01;
                hi_n += sh > 0.99;
            }
            double n = static_cast<double>(reps);
            sw.row({CsvWriter::cell(pi0), CsvWriter::cell(static_cast<double>(lo_n) / n),
                    CsvWriter::cell(static_cast<double>(hi_n) / n),
                    CsvWriter::cell(static_cast<double>(reps - lo_n - hi_n) / n)});
        }
        result.outputs.push_back(csv);
        result.outputs.push_back(scsv);
    }

    const auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    std::string manifest = path(spec->name + "_manifest.json");
    write_manifest(manifest, result.config, o.seed, secs, result.outputs);
    result.outputs.push_back(manifest);
    return result;
}

}  // namespace stakelab
