// Command-line harness: kernels, Green solvers, Monte Carlo estimators and
// decay audits, JSON/CSV in and out. Every output carries a canonical echo
// of the effective configuration so runs can be reproduced from artifacts.
//
// Exit codes: 0 success, 2 parse, 3 validation, 4 mathematical precondition,
// 5 numerical non-convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpot/audit.hpp"
#include "gpot/errors.hpp"
#include "gpot/exec.hpp"
#include "gpot/green.hpp"
#include "gpot/grid.hpp"
#include "gpot/kernels.hpp"
#include "gpot/montecarlo.hpp"
#include "gpot/rng.hpp"
#include "gpot/verify.hpp"

namespace {

using nlohmann::json;

// Flat effective configuration shared by all subcommands. A JSON config file
// seeds the fields; explicitly passed flags win over it. Unknown keys in the
// file are rejected.
struct RunConfig {
    std::string subcommand;
    std::string kernel = "gauss:b=1";
    int dim = 3;
    int grid_n = 64;
    double grid_l = 10.0;
    double lambda = 0.0;
    std::string method = "fourier";
    int series_k = 200;
    double series_tol = 1e-6;
    std::string zero_mode = "exclude";
    long long paths = 10000;
    double horizon = 10.0;
    double dt = 0.01;
    unsigned long long seed = 0;
    std::string f_spec = "gaussbump:w=1,h=1";
    std::vector<double> f_center;
    std::vector<double> x0;
    std::string radii = "2:10:9";
    std::string prop = "gauss";
    double b = 1.0;
    std::vector<int> n_list = {1, 2, 4, 8};
    std::string out;
    std::string paths_csv;
    std::string suite = "core";
    bool allow_heavy = false;
    int threads = 0;

    json to_json() const {
        json j;
        j["subcommand"] = subcommand;
        j["kernel"] = kernel;
        j["dim"] = dim;
        j["grid_n"] = grid_n;
        j["grid_l"] = grid_l;
        j["lambda"] = lambda;
        j["method"] = method;
        j["series_k"] = series_k;
        j["series_tol"] = series_tol;
        j["zero_mode"] = zero_mode;
        j["paths"] = paths;
        j["horizon"] = horizon;
        j["dt"] = dt;
        j["seed"] = seed;
        j["f"] = f_spec;
        j["f_center"] = f_center;
        j["x0"] = x0;
        j["radii"] = radii;
        j["prop"] = prop;
        j["b"] = b;
        j["n_list"] = n_list;
        j["out"] = out;
        j["paths_csv"] = paths_csv;
        j["suite"] = suite;
        j["allow_heavy"] = allow_heavy;
        j["threads"] = threads;
        return j;
    }

    void merge_file(const json& j) {
        for (const auto& [key, val] : j.items()) {
            if (key == "subcommand") subcommand = val.get<std::string>();
            else if (key == "kernel") kernel = val.get<std::string>();
            else if (key == "dim") dim = val.get<int>();
            else if (key == "grid_n") grid_n = val.get<int>();
            else if (key == "grid_l") grid_l = val.get<double>();
            else if (key == "lambda") lambda = val.get<double>();
            else if (key == "method") method = val.get<std::string>();
            else if (key == "series_k") series_k = val.get<int>();
            else if (key == "series_tol") series_tol = val.get<double>();
            else if (key == "zero_mode") zero_mode = val.get<std::string>();
            else if (key == "paths") paths = val.get<long long>();
            else if (key == "horizon") horizon = val.get<double>();
            else if (key == "dt") dt = val.get<double>();
            else if (key == "seed") seed = val.get<unsigned long long>();
            else if (key == "f") f_spec = val.get<std::string>();
            else if (key == "f_center") f_center = val.get<std::vector<double>>();
            else if (key == "x0") x0 = val.get<std::vector<double>>();
            else if (key == "radii") radii = val.get<std::string>();
            else if (key == "prop") prop = val.get<std::string>();
            else if (key == "b") b = val.get<double>();
            else if (key == "n_list") n_list = val.get<std::vector<int>>();
            else if (key == "out") out = val.get<std::string>();
            else if (key == "paths_csv") paths_csv = val.get<std::string>();
            else if (key == "suite") suite = val.get<std::string>();
            else if (key == "allow_heavy") allow_heavy = val.get<bool>();
            else if (key == "threads") threads = val.get<int>();
            else
                throw gpot::Error(gpot::Errc::ParseError, "unknown config key '" + key + "'");
        }
    }
};

std::vector<double> parse_radii(const std::string& spec) {
    // "start:stop:count" or comma-separated values
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double start = 0, stop = 0;
        long count = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%ld", &start, &stop, &count) != 3 || count < 1)
            throw gpot::Error(gpot::Errc::ParseError, "radii spec needs start:stop:count");
        for (long i = 0; i < count; ++i)
            out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
        return out;
    }
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t next = spec.find(',', pos);
        if (next == std::string::npos) next = spec.size();
        out.push_back(std::stod(spec.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw gpot::Error(gpot::Errc::ParseError, "empty radii list");
    return out;
}

std::vector<double> resolve_point(const std::vector<double>& v, int dim, const char* what) {
    if (v.empty()) return std::vector<double>(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<int>(v.size()) != dim)
        throw gpot::Error(gpot::Errc::ValidationError,
                          std::string(what) + " must have exactly dim components");
    return v;
}

gpot::TestFunction make_test_function(const RunConfig& cfg) {
    gpot::TestFunction f = gpot::TestFunction::parse(cfg.f_spec, cfg.dim);
    if (!cfg.f_center.empty()) f.set_center(resolve_point(cfg.f_center, cfg.dim, "f_center"));
    return f;
}

json estimate_to_json(const gpot::PotentialEstimate& est, const RunConfig& cfg) {
    json j;
    j["mean"] = est.mean;
    j["stderr"] = est.std_error;
    j["M"] = est.paths;
    j["T"] = est.horizon;
    j["lambda"] = est.lambda;
    j["tail_bias_bound"] = est.tail_bias_bound;
    j["discretization_bias_bound"] = est.discretization_bias_bound;
    j["seed"] = est.seed;
    j["config"] = cfg.to_json();
    return j;
}

json report_to_json(const gpot::BoundReport& rep, const RunConfig& cfg) {
    json j;
    j["prop"] = rep.prop;
    j["radii"] = rep.radii;
    j["g0"] = rep.g0_values;
    j["envelope"] = rep.envelope;
    j["constants"] = rep.constants;
    j["ratios"] = rep.ratios;
    j["ratio_monotone_growing"] = rep.ratio_monotone_growing;
    j["slope"] = {{"value", rep.loglog_slope.value}, {"ci", rep.loglog_slope.ci_half_width}};
    j["conclusion"] = gpot::audit_conclusion_name(rep.conclusion);
    j["config"] = cfg.to_json();
    return j;
}

void emit(const json& j, const RunConfig& cfg) {
    const std::string text = j.dump(2);
    std::cout << text << '\n';
    if (!cfg.out.empty()) {
        std::ofstream os(cfg.out);
        os << text << '\n';
    }
}

int cmd_kernel_info(const RunConfig& cfg) {
    const gpot::JumpKernel k = gpot::JumpKernel::parse(cfg.kernel, cfg.dim);
    const gpot::KernelMoments m = k.moments();
    if (std::abs(m.mass - 1.0) > 1e-6)
        throw gpot::Error(gpot::Errc::ValidationError,
                          "kernel mass off unity: " + std::to_string(m.mass));
    json j;
    j["kernel"] = k.spec_string();
    j["dim"] = k.dim();
    j["tail_class"] = gpot::tail_class_name(k.tail());
    j["mass"] = m.mass;
    if (m.second_moment) j["sigma2"] = *m.second_moment;
    else j["sigma2"] = "infinite";
    j["sup_density"] = m.sup_density;
    json samples = json::array();
    for (double kk : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        samples.push_back({{"k", kk}, {"a_hat", k.fourier_radial(kk)}});
    }
    j["a_hat"] = samples;
    j["config"] = cfg.to_json();
    emit(j, cfg);
    return 0;
}

gpot::GreenEstimate compute_green(const RunConfig& cfg, const gpot::JumpKernel& kernel,
                                  const gpot::GridSpec& grid) {
    gpot::GreenOptions opts;
    opts.allow_heavy = cfg.allow_heavy;
    if (cfg.zero_mode == "exclude") opts.zero_mode = gpot::ZeroModePolicy::Exclude;
    else if (cfg.zero_mode == "richardson") opts.zero_mode = gpot::ZeroModePolicy::Richardson;
    else throw gpot::Error(gpot::Errc::ParseError, "zero_mode must be exclude|richardson");
    if (cfg.method == "fourier") return gpot::green_fourier(kernel, grid, cfg.lambda, opts);
    if (cfg.method == "series")
        return gpot::green_series(kernel, grid, cfg.lambda, cfg.series_k, cfg.series_tol, opts);
    throw gpot::Error(gpot::Errc::ParseError, "method must be fourier|series");
}

json sidecar_json(const gpot::GreenEstimate& est, const RunConfig& cfg) {
    json j;
    j["lambda"] = est.lambda;
    j["method"] = gpot::green_method_name(est.method);
    j["atom_weight"] = est.atom_weight;
    j["truncation_error_bound"] = est.truncation_error_bound;
    j["series_terms"] = est.series_terms;
    j["zero_mode_policy"] =
        est.lambda == 0.0 ? gpot::zero_mode_policy_name(est.zero_mode_policy) : "n/a";
    j["zero_mode_uncertain"] = est.mean_adjusted;
    j["periodized"] = est.periodized;
    j["kernel"] = est.kernel_spec;
    j["config"] = cfg.to_json();
    return j;
}

int cmd_green_compute(const RunConfig& cfg) {
    const gpot::JumpKernel kernel = gpot::JumpKernel::parse(cfg.kernel, cfg.dim);
    const gpot::GridSpec grid = gpot::GridSpec::make(cfg.dim, cfg.grid_n, cfg.grid_l);
    if (cfg.out.empty())
        throw gpot::Error(gpot::Errc::ValidationError, "green compute needs --out <prefix>");
    const std::string csv_path = cfg.out + ".csv";
    const std::string json_path = cfg.out + ".json";
    try {
        const gpot::GreenEstimate est = compute_green(cfg, kernel, grid);
        {
            std::ofstream os(csv_path);
            gpot::write_csv(est.regular_part, os, "g");
        }
        {
            std::ofstream os(json_path);
            os << sidecar_json(est, cfg).dump(2) << '\n';
        }
        std::cout << "wrote " << csv_path << " and " << json_path << '\n';
        return 0;
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(csv_path, ec);
        std::filesystem::remove(json_path, ec);
        throw;
    }
}

int cmd_green_potential(const RunConfig& cfg) {
    const gpot::JumpKernel kernel = gpot::JumpKernel::parse(cfg.kernel, cfg.dim);
    const gpot::GridSpec grid = gpot::GridSpec::make(cfg.dim, cfg.grid_n, cfg.grid_l);
    const gpot::TestFunction f = make_test_function(cfg);
    const std::vector<double> x = resolve_point(cfg.x0, cfg.dim, "x");
    const gpot::GreenEstimate est = compute_green(cfg, kernel, grid);
    const gpot::PotentialResult v = gpot::potential(est, f, x);
    json j;
    j["value"] = v.value;
    j["zero_mode_uncertain"] = v.zero_mode_uncertain;
    j["lambda"] = cfg.lambda;
    j["x"] = x;
    j["config"] = cfg.to_json();
    emit(j, cfg);
    return 0;
}

void write_paths_csv(const std::string& path, const std::vector<double>& vals) {
    std::ofstream os(path);
    os << "path_index,functional_value\n";
    char buf[32];
    for (std::size_t i = 0; i < vals.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
        os << i << ',' << buf << '\n';
    }
}

int cmd_mc(const RunConfig& cfg) {
    const gpot::JumpKernel kernel = gpot::JumpKernel::parse(cfg.kernel, cfg.dim);
    const gpot::TestFunction f = make_test_function(cfg);
    const std::vector<double> x = resolve_point(cfg.x0, cfg.dim, "x0");
    gpot::MCConfig mc;
    mc.paths = cfg.paths;
    mc.horizon = cfg.horizon;
    mc.lambda = cfg.lambda;
    mc.master_seed = cfg.seed;
    const gpot::PotentialEstimate est = gpot::estimate_potential_cpp(kernel, f, x, mc);
    if (!cfg.paths_csv.empty()) {
        std::vector<double> vals(static_cast<std::size_t>(cfg.paths));
        gpot::parallel_for(cfg.paths, [&](std::int64_t p) {
            gpot::PathRng rng(mc.master_seed, static_cast<std::uint64_t>(p));
            vals[static_cast<std::size_t>(p)] =
                gpot::simulate_cpp_functional(kernel, f, x, mc.horizon, mc.lambda, rng);
        });
        write_paths_csv(cfg.paths_csv, vals);
    }
    emit(estimate_to_json(est, cfg), cfg);
    return 0;
}

int cmd_mc_bm(const RunConfig& cfg) {
    const gpot::TestFunction f = make_test_function(cfg);
    const std::vector<double> x = resolve_point(cfg.x0, cfg.dim, "x0");
    gpot::MCConfig mc;
    mc.paths = cfg.paths;
    mc.horizon = cfg.horizon;
    mc.lambda = cfg.lambda;
    mc.bm_step = cfg.dt;
    mc.master_seed = cfg.seed;
    const gpot::PotentialEstimate est = gpot::estimate_potential_bm(f, x, mc);
    emit(estimate_to_json(est, cfg), cfg);
    return 0;
}

int cmd_audit(const RunConfig& cfg) {
    std::vector<double> radii = parse_radii(cfg.radii);
    gpot::BoundReport rep;
    if (cfg.prop == "gauss") {
        rep = gpot::audit_gauss_bound(cfg.b, cfg.dim, radii);
    } else if (cfg.prop == "exp") {
        const gpot::JumpKernel kernel = gpot::JumpKernel::parse(cfg.kernel, cfg.dim);
        if (kernel.tail() != gpot::TailClass::LightExponential)
            throw gpot::Error(gpot::Errc::ValidationError,
                              "audit --prop exp needs an exp:delta=... kernel");
        const gpot::GridSpec grid = gpot::GridSpec::make(cfg.dim, cfg.grid_n, cfg.grid_l);
        const auto policy = cfg.zero_mode == "richardson" ? gpot::ZeroModePolicy::Richardson
                                                          : gpot::ZeroModePolicy::Exclude;
        rep = gpot::audit_exp_bound(kernel, grid, policy, radii);
    } else if (cfg.prop == "an") {
        const gpot::JumpKernel kernel = gpot::JumpKernel::parse(cfg.kernel, cfg.dim);
        const gpot::GridSpec grid = gpot::GridSpec::make(cfg.dim, cfg.grid_n, cfg.grid_l);
        rep = gpot::audit_an_bound(kernel, cfg.n_list, grid);
    } else if (cfg.prop == "newtonian") {
        const gpot::JumpKernel kernel = gpot::JumpKernel::parse(cfg.kernel, cfg.dim);
        const gpot::GridSpec grid = gpot::GridSpec::make(cfg.dim, cfg.grid_n, cfg.grid_l);
        rep = gpot::audit_newtonian(kernel, radii, &grid);
    } else {
        throw gpot::Error(gpot::Errc::ParseError, "prop must be gauss|exp|an|newtonian");
    }
    emit(report_to_json(rep, cfg), cfg);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    if (cfg.suite != "core")
        throw gpot::Error(gpot::Errc::ParseError, "unknown suite '" + cfg.suite + "'");
    const auto checks = gpot::run_core_checks(cfg.dim, cfg.grid_n, cfg.grid_l);
    bool all = true;
    json failures = json::array();
    for (const auto& c : checks) {
        std::printf("%-24s %s  metric=%.3e  gate=%.3e  %s\n", c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.metric, c.threshold, c.detail.c_str());
        if (!c.passed) {
            all = false;
            failures.push_back({{"name", c.name},
                                {"metric", c.metric},
                                {"threshold", c.threshold},
                                {"detail", c.detail}});
        }
    }
    json j;
    j["suite"] = cfg.suite;
    j["checks"] = checks.size();
    j["passed"] = all;
    j["failures"] = failures;
    j["config"] = cfg.to_json();
    std::cout << j.dump(2) << '\n';
    return all ? 0 : 1;
}

// The CLI front end. Every option is defined once on the root app and
// subcommands fall through to it, so a field can be set by flag on any
// subcommand and option counts identify which fields the user pinned.
struct Cli {
    CLI::App app{"Green measures of jump processes and Brownian motion"};
    RunConfig& cfg;
    std::string config_path;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>> merges;

    CLI::App* kinfo = nullptr;
    CLI::App* gcompute = nullptr;
    CLI::App* gpotential = nullptr;
    CLI::App* mc = nullptr;
    CLI::App* mcbm = nullptr;
    CLI::App* audit = nullptr;
    CLI::App* verify = nullptr;

    template <typename T>
    void opt(const std::string& name, T& field, const std::string& help,
             T RunConfig::*member, bool comma_list = false) {
        CLI::Option* o = app.add_option(name, field, help);
        if (comma_list) o->delimiter(',');
        merges.emplace_back(o, [member](RunConfig& dst, const RunConfig& file) {
            dst.*member = file.*member;
        });
    }

    explicit Cli(RunConfig& cfg_) : cfg(cfg_) {
        app.require_subcommand(1);
        app.add_option("--config", config_path, "JSON config file; explicit flags win");

        opt("--kernel", cfg.kernel, "kernel spec, e.g. gauss:b=1", &RunConfig::kernel);
        opt("--dim", cfg.dim, "space dimension", &RunConfig::dim);
        opt("--n", cfg.grid_n, "grid points per axis (power of two)", &RunConfig::grid_n);
        opt("--L", cfg.grid_l, "box half-width", &RunConfig::grid_l);
        opt("--lambda", cfg.lambda, "resolvent/discount parameter >= 0", &RunConfig::lambda);
        opt("--method", cfg.method, "green solver: fourier | series", &RunConfig::method);
        opt("--K", cfg.series_k, "series max terms", &RunConfig::series_k);
        opt("--tol", cfg.series_tol, "series truncation tolerance", &RunConfig::series_tol);
        opt("--zero-mode", cfg.zero_mode, "lambda = 0 policy: exclude | richardson",
            &RunConfig::zero_mode);
        opt("--paths", cfg.paths, "number of Monte Carlo paths", &RunConfig::paths);
        opt("--horizon", cfg.horizon, "time horizon T", &RunConfig::horizon);
        opt("--dt", cfg.dt, "Brownian time step", &RunConfig::dt);
        opt("--seed", cfg.seed, "master seed", &RunConfig::seed);
        opt("--f", cfg.f_spec, "test function, e.g. gaussbump:w=1,h=1", &RunConfig::f_spec);
        opt("--f-center", cfg.f_center, "test function center (comma separated)",
            &RunConfig::f_center, true);
        opt("--x0,--x", cfg.x0, "start/evaluation point (comma separated)", &RunConfig::x0, true);
        opt("--radii", cfg.radii, "start:stop:count or comma list", &RunConfig::radii);
        opt("--prop", cfg.prop, "audit: gauss | exp | an | newtonian", &RunConfig::prop);
        opt("--b", cfg.b, "gaussian decay rate for audit --prop gauss", &RunConfig::b);
        opt("--n-list", cfg.n_list, "convolution orders for audit --prop an", &RunConfig::n_list,
            true);
        opt("--out", cfg.out, "output file (prefix for green compute)", &RunConfig::out);
        opt("--paths-csv", cfg.paths_csv, "per-path functional CSV (mc)", &RunConfig::paths_csv);
        opt("--suite", cfg.suite, "verify suite name", &RunConfig::suite);
        opt("--threads", cfg.threads, "OpenMP worker threads (0 = default)", &RunConfig::threads);
        {
            CLI::Option* o = app.add_flag("--allow-heavy", cfg.allow_heavy,
                                          "experimental heavy-tail opt-in");
            merges.emplace_back(o, [](RunConfig& dst, const RunConfig& file) {
                dst.allow_heavy = file.allow_heavy;
            });
        }

        CLI::App* kernel = app.add_subcommand("kernel", "kernel family utilities");
        kernel->fallthrough();
        kinfo = kernel->add_subcommand("info", "moments and transform samples");
        kinfo->fallthrough();
        kernel->require_subcommand(1);

        CLI::App* green = app.add_subcommand("green", "Green measure solvers");
        green->fallthrough();
        gcompute = green->add_subcommand("compute", "solve G_lambda on a grid");
        gcompute->fallthrough();
        gpotential = green->add_subcommand("potential", "V_lambda(f, x) from a grid solve");
        gpotential->fallthrough();
        green->require_subcommand(1);

        mc = app.add_subcommand("mc", "compound-Poisson potential estimator");
        mc->fallthrough();
        mcbm = app.add_subcommand("mc-bm", "Brownian potential estimator");
        mcbm->fallthrough();
        audit = app.add_subcommand("audit", "decay-bound reports");
        audit->fallthrough();
        verify = app.add_subcommand("verify", "cross-method invariant suite");
        verify->fallthrough();
    }

    // fields the user did not pin by flag fall back to the config file
    void apply_file(const RunConfig& file_cfg) {
        for (auto& [option, apply] : merges)
            if (option->count() == 0) apply(cfg, file_cfg);
    }
};

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    Cli cli(cfg);
    try {
        try {
            cli.app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return cli.app.exit(e); // --help
            std::cerr << "parse error: " << e.what() << '\n';
            return 2;
        }

        if (!cli.config_path.empty()) {
            std::ifstream is(cli.config_path);
            if (!is)
                throw gpot::Error(gpot::Errc::ParseError, "cannot open config " + cli.config_path);
            const json j = json::parse(is);
            RunConfig file_cfg;
            file_cfg.merge_file(j);
            cli.apply_file(file_cfg);
        }

        gpot::set_threads(cfg.threads);

        if (cli.kinfo->parsed()) { cfg.subcommand = "kernel info"; return cmd_kernel_info(cfg); }
        if (cli.gcompute->parsed()) { cfg.subcommand = "green compute"; return cmd_green_compute(cfg); }
        if (cli.gpotential->parsed()) { cfg.subcommand = "green potential"; return cmd_green_potential(cfg); }
        if (cli.mc->parsed()) { cfg.subcommand = "mc"; return cmd_mc(cfg); }
        if (cli.mcbm->parsed()) { cfg.subcommand = "mc-bm"; return cmd_mc_bm(cfg); }
        if (cli.audit->parsed()) { cfg.subcommand = "audit"; return cmd_audit(cfg); }
        if (cli.verify->parsed()) { cfg.subcommand = "verify"; return cmd_verify(cfg); }
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const gpot::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return gpot::exit_code_for(e.code());
    } catch (const json::exception& e) {
        std::cerr << "config parse error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
