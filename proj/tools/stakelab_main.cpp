// stakelab: simulation and analysis laboratory for stake-share evolution
// under proof-of-stake rewarding schemes.
//
// Subcommands: simulate | moments | limits | figure | check
// Reproducibility contract: identical config + --seed give byte-identical
// CSV/report files for any --threads value.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "stakelab/check.hpp"
#include "stakelab/ensemble.hpp"
#include "stakelab/figures.hpp"
#include "stakelab/io.hpp"
#include "stakelab/limit_laws.hpp"
#include "stakelab/moments.hpp"
#include "stakelab/stats.hpp"
#include "stakelab/version.hpp"

namespace {

using nlohmann::json;
using namespace stakelab;

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

std::string out_path(const std::string& dir, const std::string& leaf) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / leaf).string();
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
                 int threads, std::int64_t replicates_override) {
    apply_threads(threads);
    json cfg = load_json_file(config_path);
    TrackedEnsembleConfig ec;
    ec.schedule = schedule_from_json(cfg.at("schedule"));
    ec.N = cfg.at("N").get<double>();
    ec.n0 = cfg.at("n0").get<double>();
    ec.T = cfg.at("T").get<std::int64_t>();
    ec.replicates = cfg.value("replicates", std::int64_t{1000});
    if (replicates_override > 0) ec.replicates = replicates_override;
    ec.epsilon = cfg.value("epsilon", 0.0);
    ec.snapshot_stride = cfg.value("snapshot_stride", std::int64_t{0});
    const bool emit_terminal = cfg.value("emit_terminal", false);

    auto t0 = std::chrono::steady_clock::now();
    EnsembleSummary sum = run_tracked_ensemble(ec, seed);

    std::vector<std::string> outputs;
    std::string snap_csv = out_path(out_dir, "snapshots.csv");
    {
        CsvWriter w(snap_csv);
        if (ec.epsilon > 0.0)
            w.header({"t", "mean_ratio", "var_ratio", "se", "exceed_p"});
        else
            w.header({"t", "mean_ratio", "var_ratio", "se"});
        for (std::size_t i = 0; i < sum.snap_times.size(); ++i) {
            std::vector<std::string> row{CsvWriter::cell(sum.snap_times[i]),
                                         CsvWriter::cell(sum.ratio_mean[i]),
                                         CsvWriter::cell(sum.ratio_var[i]),
                                         CsvWriter::cell(sum.ratio_se[i])};
            if (ec.epsilon > 0.0) {
                auto t = static_cast<std::size_t>(sum.snap_times[i]);
                row.push_back(CsvWriter::cell(static_cast<double>(sum.exceed_counts[t]) /
                                              static_cast<double>(sum.replicates)));
            }
            w.row(row);
        }
    }
    outputs.push_back(snap_csv);
    if (emit_terminal) {
        std::string term_csv = out_path(out_dir, "terminal.csv");
        CsvWriter w(term_csv);
        w.header({"replicate", "share", "ratio"});
        for (std::size_t r = 0; r < sum.terminal_shares.size(); ++r)
            w.row({CsvWriter::cell(static_cast<std::int64_t>(r)),
                   CsvWriter::cell(sum.terminal_shares[r]), CsvWriter::cell(sum.terminal_ratios[r])});
        outputs.push_back(term_csv);
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json resolved = cfg;
    resolved["replicates"] = ec.replicates;
    write_manifest(out_path(out_dir, "manifest.json"), resolved, seed, secs, outputs);
    std::cout << "simulate: " << sum.replicates << " replicates, T=" << sum.T
              << (sum.truncated_runs ? " (truncated)" : "") << "\n";
    return 0;
}

int cmd_moments(const std::string& config_path, const std::string& out_dir) {
    json cfg = load_json_file(config_path);
    RewardSchedule s = schedule_from_json(cfg.at("schedule"));
    double N = cfg.at("N").get<double>();
    double pi0 = cfg.at("pi0").get<double>();
    auto T = cfg.at("T").get<std::int64_t>();

    auto t0 = std::chrono::steady_clock::now();
    MomentTable mt = raw_moment_table(s, N, pi0, T);
    std::string csv = out_path(out_dir, "moments.csv");
    CsvWriter w(csv);
    w.header({"t", "a_t", "m1", "m2", "m3", "m4", "mu2", "mu3", "mu4"});
    for (std::size_t i = 0; i < mt.t.size(); ++i) {
        w.row({CsvWriter::cell(mt.t[i]), CsvWriter::cell(mt.a[i]), CsvWriter::cell(mt.m1[i]),
               CsvWriter::cell(mt.m2[i]), CsvWriter::cell(mt.m3[i]), CsvWriter::cell(mt.m4[i]),
               CsvWriter::cell(mt.mu2[i]), CsvWriter::cell(mt.mu3[i]), CsvWriter::cell(mt.mu4[i])});
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_path(out_dir, "manifest.json"), cfg, 0, secs, {csv});
    std::cout << "moments: wrote " << mt.t.size() << " rows\n";
    return 0;
}

int cmd_limits(const std::string& config_path, const std::string& out_dir, std::uint64_t seed) {
    json cfg = load_json_file(config_path);
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> outputs;
    if (cfg.contains("law")) {
        LimitLaw law = law_from_json(cfg.at("law"));
        auto n = cfg.value("n", std::size_t{10000});
        SampleBatch batch = sample_limit(law, n, seed);
        std::string csv = out_path(out_dir, "samples.csv");
        CsvWriter w(csv);
        if (batch.dim == 1) {
            w.header({"sample"});
            for (double x : batch.data) w.row({CsvWriter::cell(x)});
        } else {
            std::vector<std::string> names;
            for (std::size_t d = 0; d < batch.dim; ++d) names.push_back("x" + std::to_string(d + 1));
            w.header(names);
            for (std::size_t i = 0; i < batch.count(); ++i) {
                std::vector<std::string> row;
                for (std::size_t d = 0; d < batch.dim; ++d)
                    row.push_back(CsvWriter::cell(batch.data[i * batch.dim + d]));
                w.row(row);
            }
        }
        outputs.push_back(csv);
        json summary;
        summary["law"] = law_to_json(law);
        summary["n"] = n;
        if (batch.dim == 1) {
            MeanVar mv = mean_var(batch.data);
            summary["mean"] = mv.mean;
            summary["var"] = mv.var;
            try {
                double ks = ks_distance(batch.data, [&](double x) { return law_cdf(law, x); });
                summary["ks_to_cdf"] = ks;
            } catch (const std::invalid_argument&) {
                // no scalar cdf for this law
            }
        }
        std::string sj = out_path(out_dir, "limits_summary.json");
        std::ofstream(sj) << summary.dump(2) << "\n";
        outputs.push_back(sj);
    } else if (cfg.contains("classify")) {
        const json& c = cfg.at("classify");
        RewardSchedule s = schedule_from_json(c.at("schedule"));
        double N = c.at("N").get<double>();
        StakeRule rule{c.at("n0_rule").at("coeff").get<double>(),
                       c.at("n0_rule").at("exponent").get<double>()};
        double eps = c.value("epsilon", 0.05);
        json out;
        try {
            Classification cls = classify_and_limit(s, N, rule, eps);
            if (cls.investor_class) {
                out["investor_class"] = cls.investor_class == InvestorClass::Large    ? "large"
                                        : cls.investor_class == InvestorClass::Medium ? "medium"
                                                                                      : "small";
            }
            out["threshold"] = cls.threshold;
            switch (cls.kind) {
                case FindingKind::ConcentratesAtOne: out["finding"] = "ratio concentrates at 1"; break;
                case FindingKind::ClosedFormLaw: out["finding"] = "closed-form limit law"; break;
                case FindingKind::AntiConcentration:
                    out["finding"] = "anti-concentration: deviation probability bounded below";
                    break;
                case FindingKind::VarianceDiverges: out["finding"] = "variance of ratio diverges"; break;
                case FindingKind::Absorption: out["finding"] = "two-point absorption"; break;
            }
            if (cls.law) out["law"] = law_to_json(*cls.law);
            if (cls.bound) out["bound"] = *cls.bound;
            if (!cls.bound_tag.empty()) out["bound_regime"] = cls.bound_tag;
        } catch (const UnclassifiedRegime& e) {
            out["error"] = std::string("unclassified regime: ") + e.what();
        }
        std::string cj = out_path(out_dir, "classification.json");
        std::ofstream(cj) << out.dump(2) << "\n";
        outputs.push_back(cj);
    } else {
        std::cerr << "limits: config must contain either \"law\" or \"classify\"\n";
        return 2;
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_path(out_dir, "manifest.json"), cfg, seed, secs, outputs);
    std::cout << "limits: wrote " << outputs.size() << " file(s)\n";
    return 0;
}

int cmd_figure(const std::string& name, const std::string& out_dir, std::uint64_t seed,
               double scale, std::int64_t replicates, int threads) {
    apply_threads(threads);
    FigureOverrides o;
    o.scale = scale;
    o.seed = seed;
    o.out_dir = out_dir;
    if (replicates > 0) o.replicates = replicates;
    FigureResult res = run_figure(name, o);
    std::cout << "figure " << res.name << ": wrote";
    for (const auto& f : res.outputs) std::cout << " " << f;
    std::cout << "\n";
    return 0;
}

int cmd_check(const std::string& suite, const std::string& out_file, std::uint64_t seed,
              double scale, int threads) {
    apply_threads(threads);
    CheckOptions opt;
    opt.scale = scale;
    opt.seed = seed;
    CheckReport rep = run_suite(suite_from_name(suite), opt);
    std::cout << rep.text_summary();
    if (!out_file.empty()) {
        std::filesystem::path p(out_file);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream(out_file) << rep.to_json().dump(2) << "\n";
        std::cout << "report: " << out_file << "\n";
    }
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stake-share evolution laboratory for proof-of-stake rewarding schemes"};
    app.set_version_flag("--version", STAKELAB_VERSION);
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", out_file, fig_name, suite = "all";
    std::uint64_t seed = kDefaultMasterSeed;
    double scale = 1.0;
    std::int64_t replicates = 0;
    int threads = 0;

    auto* sim = app.add_subcommand("simulate", "run a tracked-share Monte Carlo ensemble");
    sim->add_option("--config", config_path, "JSON config")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--threads", threads, "worker threads (0: library default)");
    sim->add_option("--replicates", replicates, "override replicate count");

    auto* mom = app.add_subcommand("moments", "exact moment table for a schedule");
    mom->add_option("--config", config_path, "JSON config")->required();
    mom->add_option("--out", out_dir, "output directory");

    auto* lim = app.add_subcommand("limits", "sample limit laws / classify investors");
    lim->add_option("--config", config_path, "JSON config")->required();
    lim->add_option("--out", out_dir, "output directory");
    lim->add_option("--seed", seed, "master seed");

    auto* fig = app.add_subcommand("figure", "reproduce a named experiment grid");
    fig->add_option("name", fig_name, "figure name (fig1..fig11b)")->required();
    fig->add_option("--out", out_dir, "output directory");
    fig->add_option("--seed", seed, "master seed");
    fig->add_option("--scale", scale, "thin grids and replicate counts");
    fig->add_option("--replicates", replicates, "override replicate count");
    fig->add_option("--threads", threads, "worker threads");

    auto* chk = app.add_subcommand("check", "run acceptance suites");
    chk->add_option("suite", suite, "oracle|bounds|limits|dilution|all");
    chk->add_option("--out", out_file, "report JSON path");
    chk->add_option("--seed", seed, "master seed");
    chk->add_option("--scale", scale, "thin replicate counts");
    chk->add_option("--threads", threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed, threads, replicates);
        if (mom->parsed()) return cmd_moments(config_path, out_dir);
        if (lim->parsed()) return cmd_limits(config_path, out_dir, seed);
        if (fig->parsed()) return cmd_figure(fig_name, out_dir, seed, scale, replicates, threads);
        if (chk->parsed()) return cmd_check(suite, out_file, seed, scale, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
