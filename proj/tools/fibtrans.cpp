#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "criteria.hpp"
#include "fibtrans/complex_components.hpp"
#include "fibtrans/errors.hpp"
#include "fibtrans/io.hpp"
#include "fibtrans/parallel.hpp"
#include "fibtrans/quantum_dynamics.hpp"
#include "fibtrans/run_config.hpp"
#include "fibtrans/spectrum_geometry.hpp"
#include "fibtrans/trace_map.hpp"
#include "fibtrans/trace_polynomials.hpp"
#include "fibtrans/transfer_matrices.hpp"
#include "fibtrans/transport_exponents.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fibtrans;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_acceptance = 4;

struct AcceptanceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Run {
public:
    Run(RunConfig cfg, fs::path out) : cfg_(std::move(cfg)), out_(std::move(out)) {}

    const RunConfig& cfg() const { return cfg_; }

    void emit(const std::string& name, const std::string& text) {
        write_text(out_ / name, text);
        artifacts_.push_back(name);
    }
    void emit(const std::string& name, const CsvTable& table) { emit(name, table.str()); }
    void emit(const std::string& name, const json& j) { emit(name, json_text(j)); }

    void finish() {
        std::sort(artifacts_.begin(), artifacts_.end());
        const std::string text = cfg_.to_text();
        json m;
        m["artifact_version"] = FIBTRANS_VERSION;
        m["command"] = cfg_.command;
        m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(text));
        m["config"] = text;
        m["seed"] = cfg_.seed;
        m["precision"] = cfg_.precision == Precision::Double ? "double" : "extended";
        m["artifacts"] = artifacts_;
        write_text(out_ / "manifest.json", json_text(m));
        std::cout << "wrote " << artifacts_.size() << " artifact(s) and manifest.json to " << out_.string() << "\n";
    }

private:
    RunConfig cfg_;
    fs::path out_;
    std::vector<std::string> artifacts_;
};

std::string tag(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(6) << v;
    return os.str();
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> fallback) {
    return v.empty() ? fallback : v;
}

std::vector<double> lambdas(const RunConfig& c, std::vector<double> fallback) { return or_default(c.lambdas, fallback); }

// ---------------------------------------------------------------------------------------------

void cmd_multiplier(Run& run) {
    const auto& c = run.cfg();
    CsvTable t({"lambda", "d_lambda", "log_mu_numerical", "eig_small", "eig_mid", "eig_large"});
    for (double lambda : lambdas(c, {0.0})) {
        const auto r = multiplier_report(lambda);
        t.row(lambda, r.d_lambda, r.numerical_log_mu, r.dt6_eigenvalues[0], r.dt6_eigenvalues[1], r.dt6_eigenvalues[2]);
        std::cout << std::setprecision(17) << "lambda = " << lambda << ": d = " << r.d_lambda
                  << " (log phi = " << log_golden_ratio << "), numerical (1/6) log mu = " << r.numerical_log_mu
                  << "\n  DT^6 eigenvalues {" << r.dt6_eigenvalues[0] << ", " << r.dt6_eigenvalues[1] << ", "
                  << r.dt6_eigenvalues[2] << "}\n";
    }
    run.emit("multiplier.csv", t);
}

void cmd_traces(Run& run) {
    const auto& c = run.cfg();
    CsvTable t({"lambda", "energy", "k", "x_k", "dx_k", "escaped_at"});
    for (double lambda : lambdas(c, {1.0})) {
        for (double e : or_default(c.energies, {0.0})) {
            const auto seq = iterate_traces(lambda, e, c.k_max, default_escape_threshold, c.precision);
            const std::string esc = seq.escaped_at ? std::to_string(*seq.escaped_at) : "";
            for (const auto& v : seq.values) t.row(lambda, e, v.k, v.value, v.derivative, esc);
            std::cout << "lambda = " << lambda << ", E = " << e << ": "
                      << (seq.escaped_at ? "escaped at k = " + std::to_string(*seq.escaped_at)
                                         : "bounded through k = " + std::to_string(seq.last_index()))
                      << "\n";
        }
    }
    run.emit("traces.csv", t);
}

void cmd_zeros(Run& run) {
    const auto& c = run.cfg();
    struct Job {
        double lambda;
        int k;
    };
    std::vector<Job> jobs;
    for (double lambda : lambdas(c, {1.0})) {
        for (int k = c.k_min; k <= c.k_max; ++k) jobs.push_back({lambda, k});
    }
    const auto tables = parallel_map(jobs.size(), c.jobs, [&](std::size_t i) {
        return zero_table(jobs[i].lambda, jobs[i].k, c.eta, ZeroOptions{1e-12, c.precision});
    });
    CsvTable t({"lambda", "k", "index", "energy", "derivative", "rate", "shadow_length"});
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (std::size_t j = 0; j < tables[i].size(); ++j) {
            const auto& z = tables[i][j];
            t.row(jobs[i].lambda, jobs[i].k, j, z.energy, z.derivative, z.rate, z.shadow_length);
        }
        std::cout << "lambda = " << jobs[i].lambda << ", k = " << jobs[i].k << ": " << tables[i].size()
                  << " zeros (F_k = " << fibonacci(jobs[i].k) << ")\n";
    }
    run.emit("zeros.csv", t);
}

void cmd_keylemma(Run& run) {
    const auto& c = run.cfg();
    struct Job {
        double lambda;
        int k;
    };
    std::vector<Job> jobs;
    for (double lambda : lambdas(c, {0.1})) {
        for (int k = c.k_min; k <= c.k_max; ++k) jobs.push_back({lambda, k});
    }
    KeyZeroOptions opts;
    opts.eta = c.eta;
    opts.lambda_small = c.lambda_small;
    opts.zeros.precision = c.precision;
    struct Row {
        KeyZero kz;
        double min_gap;
        std::optional<Band> band;
    };
    const auto rows = parallel_map(jobs.size(), c.jobs, [&](std::size_t i) {
        const auto [lambda, k] = jobs[i];
        const auto zeros = zeros_of_xk(lambda, k, opts.zeros);
        const auto kz = key_zero(lambda, k, opts);
        double best = 1e300;
        for (const auto& z : zero_table(lambda, k, opts.eta, opts.zeros)) best = std::min(best, std::abs(z.rate - growth_rate(lambda)));
        return Row{kz, best, band_containing(band_components(lambda, k, c.delta_for(lambda), zeros, opts.zeros), kz.energy)};
    });
    CsvTable t({"lambda", "k", "E_k", "rate", "d_lambda", "gap", "min_gap_over_zeros", "shadow_length", "delta",
                "band_lo", "band_hi", "band_zeros"});
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = rows[i];
        const double d = growth_rate(jobs[i].lambda);
        const double delta = c.delta_for(jobs[i].lambda);
        t.row(jobs[i].lambda, jobs[i].k, r.kz.energy, r.kz.rate, d, std::abs(r.kz.rate - d), r.min_gap, r.kz.shadow_length,
              delta, r.band ? r.band->lo : std::nan(""), r.band ? r.band->hi : std::nan(""),
              r.band ? r.band->zeros_inside : 0);
        std::cout << "lambda = " << jobs[i].lambda << ", k = " << jobs[i].k << ": E_k = " << std::setprecision(12)
                  << r.kz.energy << ", rate = " << r.kz.rate << ", d = " << d << ", gap = " << std::setprecision(4)
                  << std::abs(r.kz.rate - d) << "\n";
    }
    run.emit("keylemma.csv", t);
}

void cmd_bands(Run& run) {
    const auto& c = run.cfg();
    CsvTable t({"lambda", "k", "delta", "lo", "hi", "length", "zeros_inside", "clipped"});
    for (double lambda : lambdas(c, {1.0})) {
        for (int k = c.k_min; k <= c.k_max; ++k) {
            const double delta = c.delta_for(lambda);
            const auto bands = band_components(lambda, k, delta, ZeroOptions{1e-12, c.precision});
            double total = 0;
            for (const auto& b : bands) {
                t.row(lambda, k, delta, b.lo, b.hi, b.length(), b.zeros_inside, b.clipped);
                total += b.length();
            }
            std::cout << "lambda = " << lambda << ", k = " << k << ", delta = " << delta << ": " << bands.size()
                      << " bands, total length " << total << "\n";
        }
    }
    run.emit("bands.csv", t);
}

void cmd_component(Run& run) {
    const auto& c = run.cfg();
    CsvTable summary({"lambda", "k", "delta", "center", "derivative", "inscribed_radius", "circumscribed_radius",
                      "koebe_r_inner", "koebe_r_outer", "eps_r_inner", "eps_r_outer", "vertices", "inclusions_hold"});
    for (double lambda : lambdas(c, {0.3})) {
        for (int k = c.k_min; k <= c.k_max; ++k) {
            const double delta = c.delta_for(lambda);
            std::vector<double> centers;
            if (!c.energies.empty()) {
                const auto zeros = zeros_of_xk(lambda, k);
                for (double e : c.energies) {
                    centers.push_back(*std::min_element(zeros.begin(), zeros.end(), [&](double a, double b) {
                        return std::abs(a - e) < std::abs(b - e);
                    }));
                }
            } else {
                KeyZeroOptions opts;
                opts.eta = c.eta;
                opts.lambda_small = c.lambda_small;
                centers.push_back(key_zero(lambda, k, opts).energy);
            }
            for (std::size_t ci = 0; ci < centers.size(); ++ci) {
                const double center = centers[ci];
                const auto comp = trace_component(lambda, k, delta, center);
                const double deriv = evaluate_trace(lambda, center, k).derivative;
                const auto koebe = koebe_bounds(k, delta, deriv);
                const auto eps = distortion_radii(lambda, k, delta, c.epsilon);
                const bool ok = comp.inscribed_radius >= eps.r_inner * (1 - 1e-6) &&
                                comp.circumscribed_radius <= eps.r_outer * (1 + 1e-6);
                summary.row(lambda, k, delta, center, deriv, comp.inscribed_radius, comp.circumscribed_radius,
                            koebe.r_inner, koebe.r_outer, eps.r_inner, eps.r_outer, comp.polyline.size(), ok);
                CsvTable poly({"re", "im"});
                for (const auto& z : comp.polyline) poly.row(z.real(), z.imag());
                std::string stem = "contour_lambda" + tag(lambda) + "_k" + std::to_string(k);
                if (centers.size() > 1) stem += "_" + std::to_string(ci);
                run.emit(stem + ".csv", poly);
                run.emit(stem + ".svg", contour_svg(comp, koebe));
                std::cout << "lambda = " << lambda << ", k = " << k << ", E_k = " << center << ": radii ["
                          << comp.inscribed_radius << ", " << comp.circumscribed_radius << "], bounds [" << eps.r_inner
                          << ", " << eps.r_outer << "] " << (ok ? "ok" : "VIOLATED") << "\n";
            }
        }
    }
    run.emit("component.csv", summary);
}

void cmd_xi(Run& run) {
    const auto& c = run.cfg();
    struct Job {
        double lambda, omega, energy;
    };
    std::vector<Job> jobs;
    const auto omegas = c.omega_list();
    for (double lambda : lambdas(c, {0.5})) {
        const auto zeros = zeros_of_xk(lambda, c.k_max);
        const int count = std::min<int>(c.zero_count, static_cast<int>(zeros.size()));
        for (int i = 0; i < count; ++i) {
            const double e = count == 1 ? zeros[zeros.size() / 2]
                                        : zeros[static_cast<std::size_t>(i) * (zeros.size() - 1) / (count - 1)];
            for (double omega : omegas) jobs.push_back({lambda, omega, e});
        }
    }
    const auto fits = parallel_map(jobs.size(), c.jobs, [&](std::size_t i) {
        return empirical_xi(jobs[i].lambda, jobs[i].omega, {jobs[i].energy, 0.0}, c.n_max, LevelMembership{c.k_max, 0.0});
    });
    CsvTable t({"lambda", "omega", "energy", "k", "n_max", "xi_hat", "intercept", "fit_rms", "xi_bound", "below_bound"});
    std::map<double, double> worst;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& f = fits[i];
        t.row(jobs[i].lambda, jobs[i].omega, jobs[i].energy, c.k_max, c.n_max, f.xi_hat, f.intercept, f.residual,
              f.xi_bound, f.xi_hat <= f.xi_bound);
        worst[jobs[i].lambda] = std::max(worst.count(jobs[i].lambda) ? worst[jobs[i].lambda] : -1e300, f.xi_hat);
    }
    for (const auto& [lambda, w] : worst) {
        std::cout << "lambda = " << lambda << ": max xi_hat = " << w << ", threshold = " << xi_threshold(lambda) << "\n";
    }
    run.emit("xi.csv", t);
}

void cmd_dynamics(Run& run) {
    const auto& c = run.cfg();
    const auto ps = or_default(c.p_values, {2.0});
    const auto grid = c.T_grid();
    struct Job {
        double lambda, omega;
    };
    std::vector<Job> jobs;
    for (double lambda : lambdas(c, {1.0})) {
        for (double omega : c.omega_list()) jobs.push_back({lambda, omega});
    }
    const bool time_route = c.route != "resolvent";
    const bool resolvent_route = c.route != "time";
    struct Out {
        DynamicsResult time;
        std::map<long, std::vector<double>> resolvent;
    };
    const auto results = parallel_map(jobs.size(), c.jobs, [&](std::size_t i) {
        const auto h = Hamiltonian::fibonacci(jobs[i].lambda, jobs[i].omega, c.L);
        Out o;
        o.time = run_dynamics(h, grid, ps, time_route ? c.N_values : std::vector<long>{}, c.window_fraction);
        if (resolvent_route) {
            for (long N : c.N_values) {
                for (double T : grid) o.resolvent[N].push_back(outside_prob(h, N, T, Route::Resolvent, c.window_fraction));
            }
        }
        return o;
    });
    CsvTable t({"lambda", "omega", "L", "quantity", "p_or_N", "T", "value", "route"});
    json j = json::array();
    std::vector<SvgSeries> series;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = results[i].time;
        json entry{{"lambda", r.lambda}, {"omega", r.omega}, {"L", c.L}, {"T", grid}};
        for (const auto& [p, values] : r.moments) {
            for (std::size_t q = 0; q < grid.size(); ++q) t.row(r.lambda, r.omega, c.L, "moment", p, grid[q], values[q], "time");
            entry["moments"][tag(p)] = values;
            series.push_back({"lambda=" + tag(r.lambda) + " w=" + tag(r.omega) + " p=" + tag(p), grid, values});
        }
        for (const auto& [N, values] : r.outside) {
            for (std::size_t q = 0; q < grid.size(); ++q) {
                t.row(r.lambda, r.omega, c.L, "outside", static_cast<double>(N), grid[q], values[q], "time");
            }
            entry["outside_time"][std::to_string(N)] = values;
        }
        for (const auto& [N, values] : results[i].resolvent) {
            for (std::size_t q = 0; q < grid.size(); ++q) {
                t.row(r.lambda, r.omega, c.L, "outside", static_cast<double>(N), grid[q], values[q], "resolvent");
            }
            entry["outside_resolvent"][std::to_string(N)] = values;
        }
        j.push_back(entry);
    }
    run.emit("dynamics.csv", t);
    run.emit("dynamics.json", j);
    run.emit("moments.svg", series_svg({"Abel-averaged moments", "T", "<<|X|^p>>(T)", true, true}, series));
    std::cout << jobs.size() << " Hamiltonian(s), " << grid.size() << " time scales\n";
}

void cmd_parseval(Run& run) {
    const auto& c = run.cfg();
    CsvTable t({"lambda", "omega", "L", "n", "T", "time_side", "energy_side", "residual", "resolvable"});
    const auto Ts = or_default(c.T_values, {25.0});
    for (double lambda : lambdas(c, {1.0})) {
        for (double omega : c.omega_list()) {
            const auto h = Hamiltonian::fibonacci(lambda, omega, c.L);
            for (long n : or_default(c.sites, {0L})) {
                for (double T : Ts) {
                    const auto s = parseval_sides(h, n, T);
                    t.row(lambda, omega, c.L, n, T, s.time_side, s.energy_side, s.residual, s.resolvable);
                    std::cout << "lambda = " << lambda << ", omega = " << omega << ", L = " << c.L << ", n = " << n
                              << ", T = " << T << ": residual = " << std::setprecision(3) << s.residual
                              << (s.resolvable ? "" : " (below the 1e-10 probability floor)") << std::setprecision(6)
                              << "\n";
                }
            }
        }
    }
    run.emit("parseval.csv", t);
}

void cmd_transport(Run& run) {
    const auto& c = run.cfg();
    const auto ps = or_default(c.p_values, {2.0});
    const auto grid = c.T_grid();
    struct Job {
        double lambda, omega;
    };
    std::vector<Job> jobs;
    for (double lambda : lambdas(c, {1.0})) {
        for (double omega : c.omega_list()) jobs.push_back({lambda, omega});
    }
    const auto results = parallel_map(jobs.size(), c.jobs, [&](std::size_t i) {
        return run_dynamics(Hamiltonian::fibonacci(jobs[i].lambda, jobs[i].omega, c.L), grid, ps, {}, c.window_fraction);
    });
    CsvTable t({"lambda", "omega", "p", "beta_minus_hat", "beta_plus_hat", "global_slope", "alpha_lower", "beta_lower"});
    CsvTable w({"lambda", "omega", "p", "window_first", "t_lo", "t_hi", "slope"});
    json j = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (double p : ps) {
            const auto fit = fit_beta(results[i], p);
            const double al = alpha_lower(jobs[i].lambda);
            const double bl = beta_lower(jobs[i].lambda, p);
            t.row(jobs[i].lambda, jobs[i].omega, p, fit.beta_minus_hat, fit.beta_plus_hat, fit.global_slope, al, bl);
            for (const auto& win : fit.windows) w.row(jobs[i].lambda, jobs[i].omega, p, win.first, win.t_lo, win.t_hi, win.slope);
            j.push_back({{"lambda", jobs[i].lambda},
                         {"omega", jobs[i].omega},
                         {"p", p},
                         {"beta_minus_hat", fit.beta_minus_hat},
                         {"beta_plus_hat", fit.beta_plus_hat},
                         {"alpha_lower", al},
                         {"beta_lower", bl},
                         {"window", fit.window}});
            std::cout << "lambda = " << jobs[i].lambda << ", omega = " << jobs[i].omega << ", p = " << p
                      << ": beta in [" << fit.beta_minus_hat << ", " << fit.beta_plus_hat << "], alpha_lower = " << al
                      << "\n";
        }
    }
    run.emit("transport.csv", t);
    run.emit("transport_windows.csv", w);
    run.emit("transport.json", j);
}

void cmd_dimension(Run& run) {
    const auto& c = run.cfg();
    const auto ls = lambdas(c, {0.1, 0.5, 1.0, 2.0});
    const auto est = parallel_map(ls.size(), c.jobs, [&](std::size_t i) { return box_dimension(ls[i], c.k_min, c.k_max); });
    CsvTable t({"lambda", "k", "band_count", "total_length", "mean_length"});
    json j = json::array();
    for (const auto& e : est) {
        for (const auto& s : e.levels) t.row(e.lambda, s.k, s.band_count, s.total_length, s.mean_length);
        const auto cor = corollary_check(e.lambda, e.dim_hat);
        j.push_back({{"lambda", e.lambda},
                     {"dim_hat", e.dim_hat},
                     {"standard_error", e.standard_error},
                     {"degenerate", e.degenerate},
                     {"lengths_non_increasing", e.lengths_non_increasing},
                     {"alpha_lower", cor.alpha_lower},
                     {"gap", cor.gap},
                     {"k_min", e.k_min},
                     {"k_max", e.k_max}});
        std::cout << "lambda = " << e.lambda << ": dim_hat = " << e.dim_hat << " +- " << e.standard_error
                  << (e.degenerate ? " (degenerate)" : "") << ", alpha_lower - dim_hat = " << cor.gap << "\n";
    }
    run.emit("dimension.csv", t);
    run.emit("dimension.json", j);
}

void cmd_report(Run& run) {
    const auto& c = run.cfg();
    const auto& list = acceptance::criteria();
    const auto results = parallel_map(list.size(), c.jobs, [&](std::size_t i) { return acceptance::run_criterion(list[i]); });
    CsvTable t({"criterion", "name", "pass", "seconds", "budget_seconds", "detail"});
    json j = json::array();
    int failed = 0;
    for (const auto& r : results) {
        std::cout << acceptance::format_line(r) << std::endl;
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        t.row(r.id, r.name, r.pass, r.seconds, r.budget_seconds, detail);
        j.push_back({{"criterion", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}});
        failed += !r.pass;
    }

    // Comparison table: closed-form alpha_lower, band-cover dimension and fitted beta(2).
    CsvTable s({"lambda", "alpha_lower", "dim_hat", "beta_hat_2"});
    std::map<double, double> beta;
    for (const auto& r : results) {
        if (r.id != 12) continue;
        for (double lambda : {0.0, 0.5, 2.0, 8.0}) {
            const std::string key = "lambda_" + tag(lambda);
            if (r.data.contains(key)) beta[lambda] = r.data[key]["beta_plus"].get<double>();
        }
    }
    for (double lambda : {0.0, 0.05, 0.1, 0.5, 2.0, 8.0}) {
        const double dim = box_dimension(lambda, 4, 14).dim_hat;
        s.row(lambda, alpha_lower(lambda), dim, beta.count(lambda) ? beta[lambda] : std::nan(""));
    }
    run.emit("report.csv", t);
    run.emit("report.json", j);
    run.emit("summary.csv", s);
    std::cout << list.size() - failed << "/" << list.size() << " criteria passed\n";
    run.finish();
    if (failed) throw AcceptanceFailure(std::to_string(failed) + " acceptance criteria failed");
}

// ---------------------------------------------------------------------------------------------

struct FlagSpec {
    std::string key;
    std::string help;
};

const std::vector<FlagSpec>& flag_specs() {
    static const std::vector<FlagSpec> specs{
        {"lambda", "coupling constant(s)"},
        {"omega", "phase(s) in [0,1)"},
        {"omega_samples", "number of phases drawn uniformly from the seed"},
        {"seed", "seed for sampled phases"},
        {"k", "level or level range, e.g. 12 or 10..18"},
        {"delta", "level-set slack, absolute or as a multiple of lambda^2"},
        {"delta_rule", "absolute | lambda2"},
        {"L", "half-width of the lattice (sites -L..L)"},
        {"T", "explicit time scale(s)"},
        {"T_min", "smallest time scale of the geometric grid"},
        {"T_max", "largest time scale of the geometric grid"},
        {"T_count", "number of grid time scales"},
        {"p", "moment order(s)"},
        {"N", "outside-probability radius(es)"},
        {"n", "lattice site(s)"},
        {"energy", "energy value(s)"},
        {"eta", "shadowing distance to the six-cycle"},
        {"lambda_small", "upper coupling limit for the key-zero selection"},
        {"epsilon", "exponent slack for the distortion radii"},
        {"n_max", "largest n in the transfer-matrix power-law fit"},
        {"zeros", "number of zeros sampled by xi"},
        {"window", "reliable window as a fraction of L"},
        {"precision", "double | extended"},
        {"route", "time | resolvent | both"},
        {"out", "output directory (also FIBTRANS_OUT)"},
        {"jobs", "worker threads"},
    };
    return specs;
}

std::string flag_name(const std::string& key) {
    std::string s = key;
    std::replace(s.begin(), s.end(), '_', '-');
    return "--" + s;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-map and transport laboratory for the Fibonacci Hamiltonian"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(FIBTRANS_VERSION));

    using Handler = void (*)(Run&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands{
        {"multiplier", "six-cycle multipliers and the growth rate d(lambda)", cmd_multiplier},
        {"traces", "trace polynomial values and derivatives along the orbit", cmd_traces},
        {"zeros", "zeros of x_k with derivatives and shadow lengths", cmd_zeros},
        {"keylemma", "key zeros, derivative rates and their bands", cmd_keylemma},
        {"bands", "real components of |x_k| <= 1 + delta", cmd_bands},
        {"component", "complex component around a zero with distortion radii", cmd_component},
        {"xi", "transfer-matrix power-law exponents on zeros of x_k", cmd_xi},
        {"dynamics", "Abel-averaged moments and outside probabilities", cmd_dynamics},
        {"parseval", "both sides of the Parseval identity", cmd_parseval},
        {"transport", "windowed transport exponents and closed-form bounds", cmd_transport},
        {"dimension", "band-cover dimension estimates", cmd_dimension},
        {"report", "full acceptance sweep with comparison summary", cmd_report},
    };

    std::map<std::string, std::vector<std::string>> flags;
    std::string config_path;
    std::map<CLI::App*, Handler> handlers;
    for (const auto& [name, help, handler] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "key = value config file");
        for (const auto& spec : flag_specs()) sub->add_option(flag_name(spec.key), flags[spec.key], spec.help);
        handlers[sub] = handler;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        ConfigEntries file;
        if (!config_path.empty()) file = parse_entries(read_file(config_path), config_path);
        ConfigEntries from_flags;
        for (const auto& [key, values] : flags) {
            for (const auto& v : values) from_flags[key].push_back({v, flag_name(key)});
        }
        RunConfig cfg = build_config(overlay(std::move(file), from_flags));
        CLI::App* chosen = app.get_subcommands().front();
        cfg.command = chosen->get_name();
        if (from_flags.count("out") == 0) {
            if (const char* env = std::getenv("FIBTRANS_OUT"); env && *env) cfg.output_dir = env;
        }
        Run run(cfg, fs::path(cfg.output_dir));
        handlers.at(chosen)(run);
        if (cfg.command != "report") run.finish();
        return 0;
    } catch (const AcceptanceFailure& e) {
        std::cerr << "acceptance failure: " << e.what() << "\n";
        return exit_acceptance;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}
