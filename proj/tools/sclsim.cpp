#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "scldpc/evolution.hpp"
#include "scldpc/montecarlo.hpp"
#include "scldpc/scaling.hpp"

namespace fs = std::filesystem;
using namespace scldpc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitUnusable = 2;
constexpr int kExitResource = 3;

struct Common {
    uint64_t seed = 1;
    int threads = 0;
    std::string out = "scldpc_out";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--threads", c.threads, "worker cap (0 = all cores)");
    cmd->add_option("--out", c.out, "output directory");
}

void prepare_out(const Common& c, const CLI::App& app, const std::string& sub) {
    fs::create_directories(c.out);
    std::ofstream f(fs::path(c.out) / ("config_resolved_" + sub + ".txt"));
    f << app.config_to_str(true, false);
    if (c.threads > 0) omp_set_num_threads(c.threads);
}

std::vector<double> parse_eps_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--eps-grid", "empty grid");
    for (size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1]))
            throw CLI::ValidationError("--eps-grid", "grid must be ascending");
    return out;
}

struct GridRow {
    double epsilon;
    int N, L, W;  // W = -1 means full BP
};

std::vector<GridRow> read_grid_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open grid file: " + path);
    std::vector<GridRow> rows;
    std::string line;
    while (std::getline(f, line)) {
        const auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        GridRow r{};
        std::string w;
        if (!(ls >> r.epsilon >> r.N >> r.L >> w)) continue;
        r.W = (w == "full") ? -1 : std::stoi(w);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("grid file has no rows: " + path);
    return rows;
}

void print_point(std::ostream& os, const PointStats& p) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "eps=%-10.6g frames=%-8lld fer=%-12.5g [%.3g, %.3g] "
                  "ber=%-12.5g bler=%-12.5g expurgated=%lld",
                  p.epsilon, static_cast<long long>(p.frames), p.fer, p.fer_lo,
                  p.fer_hi, p.ber, p.bler,
                  static_cast<long long>(p.expurgated));
    os << buf << '\n';
}

int run_threshold(const Common& c, int dv, int dc, int L, double tol) {
    const double es = de_threshold(dv, dc, L, tol);
    std::printf("%.17g\n", es);
    (void)c;
    return kExitOk;
}

int run_estimate(const Common& c, EstimateConfig cfg) {
    cfg.seed = c.seed;
    EstimateDiagnostics diag;
    const ScalingParams table = build_scaling_params(cfg, &diag);

    std::ostringstream name;
    name << "scaling_dv" << cfg.dv << "_dc" << cfg.dc << "_L" << cfg.L
         << ".params";
    const auto table_path = fs::path(c.out) / name.str();
    save_scaling_params(table_path.string(), table);
    std::printf("eps_star %.17g\n", table.eps_star);
    std::printf("nu %.17g theta %.17g (at eps=%.6g)\n", table.nu, table.theta,
                table.nu_theta_epsilon);
    std::printf("table -> %s\n", table_path.string().c_str());

    std::ofstream dg(fs::path(c.out) / "estimate_diagnostics.txt");
    dg << std::setprecision(10);
    dg << "gamma_term/gamma_trunc per grid epsilon:\n";
    bool ratio_ok = true;
    for (size_t i = 0; i < diag.gamma_ratio.size(); ++i) {
        dg << "  eps=" << cfg.eps_grid[i] << " ratio=" << diag.gamma_ratio[i]
           << '\n';
        if (diag.gamma_ratio[i] < 1.8 || diag.gamma_ratio[i] > 2.2)
            ratio_ok = false;
    }
    dg << "plateau tolerance sensitivity (alpha/beta/gamma per tol):\n";
    for (const auto& s : diag.sensitivity)
        dg << "  eps=" << s.epsilon << (s.terminated ? " term" : " trunc")
           << " tol=" << s.tol << " alpha=" << s.alpha << " beta=" << s.beta
           << " gamma=" << s.gamma << '\n';
    dg << "nu/theta steady state: [" << diag.nu_theta_alpha << ", "
       << diag.nu_theta_beta << "]\n";
    std::printf("gamma two-wave ratio check: %s\n",
                ratio_ok ? "PASS (all in [1.8, 2.2])" : "WARN (outside [1.8, 2.2])");
    return kExitOk;
}

int run_predict(const Common& c, const std::string& params_path,
                const std::string& grid_path) {
    const ScalingParams table = load_scaling_params(params_path);
    const auto grid = read_grid_file(grid_path);

    std::ofstream csv(fs::path(c.out) / "predictions.csv");
    csv << std::setprecision(17);
    csv << "epsilon,N,L,W,fer,ber,bler,mu0,alpha,beta,gamma,s,model\n";
    std::ofstream rec(fs::path(c.out) / "eq13_reconciliation.txt");
    std::set<std::string> warnings;

    for (const auto& row : grid) {
        PredictInput in{row.L, row.N, row.epsilon, &table};
        PredictWarnings w;
        if (row.W < 0) {
            const RatePrediction r = predict_full_bp(in, &w);
            csv << row.epsilon << ',' << row.N << ',' << row.L << ",full,"
                << r.fer << ',' << r.ber << ',' << r.bler << ',' << r.used.mu0
                << ',' << r.used.alpha << ',' << r.used.beta << ','
                << r.used.gamma << ',' << r.used.speed << ",refined\n";
            const RatePrediction o = predict_olmos(in, nullptr, &w);
            csv << row.epsilon << ',' << row.N << ',' << row.L << ",full,"
                << o.fer << ',' << o.ber << ',' << o.bler << ',' << o.used.mu0
                << ',' << o.used.alpha << ',' << o.used.beta << ','
                << o.used.gamma << ',' << o.used.speed << ",olmos\n";
            rec << eq13_reconciliation_report(in) << '\n';
        } else {
            const RatePrediction r = predict_window(in, row.W, &w);
            csv << row.epsilon << ',' << row.N << ',' << row.L << ',' << row.W
                << ',' << r.fer << ',' << r.ber << ',' << r.bler << ','
                << r.used.mu0 << ',' << r.used.alpha << ',' << r.used.beta
                << ',' << r.used.gamma << ',' << r.used.speed << ",window\n";
        }
        for (const auto& note : w.notes) warnings.insert(note);
    }
    for (const auto& note : warnings) std::fprintf(stderr, "warning: %s\n", note.c_str());
    std::printf("predictions -> %s\n",
                (fs::path(c.out) / "predictions.csv").string().c_str());
    return kExitOk;
}

struct SimulateArgs {
    int dv = 5, dc = 10, L = 50, N = 1000;
    std::string kind = "Terminated";
    std::string eps_grid;
    std::string decoder = "full";
    int W = 0;
    int64_t frames = 100000;
    int64_t target_errors = 200;
    int64_t batch = 1024;
    bool no_expurgate = false;
    bool fixed_graph = false;
};

int run_simulate(const Common& c, const SimulateArgs& a) {
    ExperimentSpec spec;
    spec.params = {a.dv, a.dc, a.L, a.N, chain_kind_from_string(a.kind)};
    spec.epsilons = parse_eps_list(a.eps_grid);
    if (a.decoder == "full")
        spec.decoder = FullBp{};
    else if (a.decoder == "window")
        spec.decoder = WindowConfig{a.W, false};
    else
        throw CLI::ValidationError("--decoder", "must be full or window");
    spec.max_frames = a.frames;
    spec.target_frame_errors = a.target_errors;
    spec.master_seed = c.seed;
    spec.expurgate = !a.no_expurgate;
    spec.batch_size = a.batch;
    spec.fixed_graph = a.fixed_graph;

    const ErrorStats stats = run_experiment(spec);
    {
        std::ofstream f(fs::path(c.out) / "simulation.csv");
        write_stats_csv(f, stats);
    }
    {
        std::ofstream f(fs::path(c.out) / "manifest.txt");
        write_manifest(f, spec, stats);
    }
    for (const auto& p : stats.points) print_point(std::cout, p);
    std::printf("results -> %s\n",
                (fs::path(c.out) / "simulation.csv").string().c_str());
    return kExitOk;
}

int run_compare(const Common& c, const std::string& sim_path,
                const std::string& pred_path, const std::string& model) {
    std::ifstream sf(sim_path);
    if (!sf) throw std::runtime_error("cannot open " + sim_path);
    const ErrorStats stats = read_stats_csv(sf);

    std::ifstream pf(pred_path);
    if (!pf) throw std::runtime_error("cannot open " + pred_path);
    std::vector<PredictionRow> preds;
    std::string line;
    std::getline(pf, line);  // header
    while (std::getline(pf, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) cols.push_back(tok);
        if (cols.size() < 13) continue;
        if (model != "any" && cols[12] != model) continue;
        PredictionRow r;
        r.epsilon = std::stod(cols[0]);
        r.fer = std::stod(cols[4]);
        r.ber = std::stod(cols[5]);
        r.bler = std::stod(cols[6]);
        preds.push_back(r);
    }

    const CompareReport report = compare(stats, preds);
    {
        std::ofstream f(fs::path(c.out) / "compare.csv");
        write_compare_csv(f, report);
    }
    for (const auto& r : report.rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "eps=%-10.6g %-5s sim=%-12.5g pred=%-12.5g ratio=%-10.4g %s",
                      r.epsilon, r.metric.c_str(), r.simulated, r.predicted,
                      r.ratio, r.flagged ? "FLAG" : "ok");
        std::cout << buf << '\n';
    }
    std::printf("%d of %zu entries outside factor 2\n", report.flagged_count,
                report.rows.size());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-length scaling toolkit for SC-LDPC codes on the BEC"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file");

    // threshold
    auto* th = app.add_subcommand("threshold", "BP threshold via density evolution");
    Common th_c;
    int th_dv = 5, th_dc = 10, th_L = 50;
    double th_tol = 1e-4;
    th->add_option("--dv", th_dv, "VN degree")->required();
    th->add_option("--dc", th_dc, "CN degree")->required();
    th->add_option("-L,--chain-length", th_L, "coupling length")->required();
    th->add_option("--tol", th_tol, "bisection width");
    add_common(th, th_c);

    // estimate
    auto* es = app.add_subcommand("estimate", "estimate scaling parameters");
    Common es_c;
    EstimateConfig es_cfg;
    std::string es_grid;
    es->add_option("--dv", es_cfg.dv, "VN degree")->required();
    es->add_option("--dc", es_cfg.dc, "CN degree")->required();
    es->add_option("-L,--chain-length", es_cfg.L, "coupling length")->required();
    es->add_option("-N,--component-length", es_cfg.N, "VNs per position");
    es->add_option("--trials", es_cfg.trials, "trials per trajectory");
    es->add_option("--eps-grid", es_grid, "ascending comma list")->required();
    es->add_option("--nu-theta-eps", es_cfg.nu_theta_eps,
                   "estimation point for nu/theta")->required();
    es->add_option("--nu-theta-trials", es_cfg.nu_theta_trials,
                   "trials for nu/theta");
    es->add_option("--plateau-tol", es_cfg.plateau_tol, "plateau band");
    es->add_option("--de-tol", es_cfg.de_tol, "threshold bisection width");
    es->add_option("--olmos-theta-hat", es_cfg.olmos_theta_hat,
                   "external baseline theta (0 = estimate)");
    add_common(es, es_c);

    // predict
    auto* pr = app.add_subcommand("predict", "evaluate the scaling laws");
    Common pr_c;
    std::string pr_params, pr_grid;
    pr->add_option("--params", pr_params, "scaling table file")->required();
    pr->add_option("--grid", pr_grid, "grid file: epsilon N L W|full")->required();
    add_common(pr, pr_c);

    // simulate
    auto* si = app.add_subcommand("simulate", "Monte-Carlo error-rate runs");
    Common si_c;
    SimulateArgs sa;
    si->add_option("--dv", sa.dv, "VN degree")->required();
    si->add_option("--dc", sa.dc, "CN degree")->required();
    si->add_option("-L,--chain-length", sa.L, "coupling length")->required();
    si->add_option("-N,--component-length", sa.N, "VNs per position")->required();
    si->add_option("--kind", sa.kind, "Terminated or Truncated");
    si->add_option("--eps-grid", sa.eps_grid, "ascending comma list")->required();
    si->add_option("--decoder", sa.decoder, "full or window");
    si->add_option("-W,--window", sa.W, "window size in CN positions");
    si->add_option("--frames", sa.frames, "frame cap per grid point");
    si->add_option("--target-errors", sa.target_errors,
                   "stop after this many frame errors (0 = never)");
    si->add_option("--batch-size", sa.batch, "stopping-rule batch size");
    si->add_flag("--no-expurgate", sa.no_expurgate,
                 "count size-2 stopping-set failures as errors");
    si->add_flag("--fixed-graph", sa.fixed_graph, "debug: one graph per point");
    add_common(si, si_c);

    // compare
    auto* co = app.add_subcommand("compare", "simulated vs predicted report");
    Common co_c;
    std::string co_sim, co_pred, co_model = "any";
    co->add_option("--sim", co_sim, "simulation.csv")->required();
    co->add_option("--pred", co_pred, "predictions.csv")->required();
    co->add_option("--model", co_model, "refined, olmos, window, or any");
    add_common(co, co_c);

    CLI11_PARSE(app, argc, argv);

    try {
        if (th->parsed()) {
            prepare_out(th_c, app, "threshold");
            return run_threshold(th_c, th_dv, th_dc, th_L, th_tol);
        }
        if (es->parsed()) {
            prepare_out(es_c, app, "estimate");
            es_cfg.eps_grid = parse_eps_list(es_grid);
            return run_estimate(es_c, es_cfg);
        }
        if (pr->parsed()) {
            prepare_out(pr_c, app, "predict");
            return run_predict(pr_c, pr_params, pr_grid);
        }
        if (si->parsed()) {
            prepare_out(si_c, app, "simulate");
            return run_simulate(si_c, sa);
        }
        if (co->parsed()) {
            prepare_out(co_c, app, "compare");
            return run_compare(co_c, co_sim, co_pred, co_model);
        }
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.find("unusable") != std::string::npos) {
            std::fprintf(stderr, "estimation unusable: %s\n", e.what());
            return kExitUnusable;
        }
        std::fprintf(stderr, "aborted: %s\n", e.what());
        return kExitResource;
    }
    return kExitOk;
}
