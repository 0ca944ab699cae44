#include "commands.hpp"

#include <burgers/fock.hpp>
#include <burgers/fock_dense.hpp>
#include <burgers/generator_solver.hpp>
#include <burgers/replacement.hpp>
#include <burgers/resolvent_paths.hpp>
#include <burgers/simulator.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#ifndef BURGERS_GIT_HASH
#define BURGERS_GIT_HASH "unknown"
#endif

namespace cli {

using namespace burgers;
using nlohmann::json;

OutputSet::OutputSet(std::filesystem::path dir, std::string stem) : dir_(std::move(dir)), stem_(std::move(stem)) {}

std::ofstream OutputSet::open(std::string_view part) {
    auto path = dir_ / (stem_ + (part.empty() ? "" : "-" + std::string(part)) + ".csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    files_.push_back(path);
    return os;
}

std::filesystem::path OutputSet::manifest_path() const { return dir_ / (stem_ + ".json"); }

namespace {

std::vector<std::string> mode_columns(int dim, std::string_view prefix = "k") {
    std::vector<std::string> out;
    for (int i = 0; i < dim; ++i) out.push_back(std::string(prefix) + std::to_string(i));
    return out;
}

void mode_cells(CsvWriter& csv, const Mode& k) {
    for (int i = 0; i < k.dim(); ++i) csv.cell(k[i]);
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

void expect_dim(const Config& config, int dim, std::string_view command) {
    if (config.has("lattice.d") && config.integer("lattice.d", 1, 100) != dim)
        throw ConfigError("key 'lattice.d' must be " + std::to_string(dim) + " for " + std::string(command));
}

Mode unit_mode(int dim) {
    std::vector<int> c(static_cast<std::size_t>(dim), 0);
    c[0] = 1;
    return Mode(std::span<const int>(c));
}

// ---------------------------------------------------------------- simulation

void cmd_simulate(Context& ctx) {
    const auto sim = read_sim(ctx.config, ctx.settings);
    const auto steps = sim.steps();
    const auto every = static_cast<std::size_t>(
        ctx.config.integer("simulate.sample_every", 1, static_cast<long long>(steps), static_cast<long long>(steps)));
    const std::size_t samples = steps / every + 1;
    const std::size_t modes = sim.lattice->size();
    const std::size_t entries = sim.replicas * samples * modes;
    if (entries > ctx.settings.sparse_budget()) throw BudgetExceeded("stored snapshots", entries, ctx.settings.sparse_budget());

    std::vector<std::vector<Complex>> store(sim.replicas);
    run_replicas(sim, [&](std::size_t r, std::size_t s, const SpectralField& f) {
        if (s % every) return;
        store[r].insert(store[r].end(), f.coeffs().begin(), f.coeffs().end());
    });

    auto os = ctx.out.open();
    CsvWriter csv(os);
    const auto& lat = *sim.lattice;
    csv.header(concat(concat({"replica", "step", "time"}, mode_columns(lat.dim())), {"re", "im"}));
    for (std::size_t r = 0; r < sim.replicas; ++r)
        for (std::size_t j = 0; j < samples; ++j) {
            const std::size_t s = j * every;
            for (std::size_t i = 0; i < modes; ++i) {
                const Complex x = store[r][j * modes + i];
                csv.cell(r).cell(s).cell(static_cast<double>(s) * sim.dt);
                mode_cells(csv, lat.mode(i));
                csv.cell(x.real()).cell(x.imag());
                csv.end_row();
            }
        }
    ctx.log << "simulate: " << sim.replicas << " replicas, " << steps << " steps, " << samples << " snapshots\n";
}

void cmd_stationarity(Context& ctx) {
    const auto sim = read_sim(ctx.config, ctx.settings);
    const auto every = static_cast<std::size_t>(ctx.config.integer("stationarity.sample_every", 1, 1'000'000'000, 1));
    const auto rep = stationarity(sim, every);
    const int d = sim.lattice->dim();

    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header(concat(concat({"time"}, mode_columns(d)), {"mean_abs2", "std_err", "z"}));
    for (std::size_t t = 0; t < rep.times.size(); ++t)
        for (std::size_t m = 0; m < rep.modes.size(); ++m) {
            const double mean = rep.mean[t][m], se = rep.std_err[t][m];
            csv.cell(rep.times[t]);
            mode_cells(csv, rep.modes[m]);
            csv.cell(mean).cell(se).cell(se > 0 ? std::abs(mean - 1.0) / se : 0.0);
            csv.end_row();
        }

    auto om = ctx.out.open("modes");
    CsvWriter mc(om);
    mc.header(concat(mode_columns(d), {"time_mean", "time_stderr", "z"}));
    for (std::size_t m = 0; m < rep.modes.size(); ++m) {
        const double se = rep.time_stderr[m];
        mode_cells(mc, rep.modes[m]);
        mc.cell(rep.time_mean[m]).cell(se).cell(se > 0 ? std::abs(rep.time_mean[m] - 1.0) / se : 0.0);
        mc.end_row();
    }

    auto oe = ctx.out.open("energy");
    CsvWriter ec(oe);
    ec.header({"time", "energy_mean", "energy_stderr", "modes"});
    for (std::size_t t = 0; t < rep.times.size(); ++t)
        ec.cell(rep.times[t]).cell(rep.energy_mean[t]).cell(rep.energy_stderr[t]).cell(sim.lattice->size()).end_row();

    ctx.log << "stationarity: max z " << rep.max_z << ", max time-averaged z " << rep.max_z_averaged << "\n";
}

void cmd_ito_check(Context& ctx) {
    const auto sim = read_sim(ctx.config, ctx.settings);
    const auto& lat = sim.lattice;
    const std::string kind = ctx.config.choice("ito.observables", {"analytic", "random"}, "analytic");
    std::vector<ChaosVector> obs;
    if (kind == "analytic") {
        const Mode k = ctx.config.has("ito.k") ? read_mode(ctx.config, "ito.k", lat->dim()) : unit_mode(lat->dim());
        if (!lat->contains(k)) throw ConfigError("key 'ito.k' must be a lattice mode");
        FockKernel f(lat, 1);
        f.set(ModeTuple::from({static_cast<ModeTuple::Index>(lat->index_of(k))}), 1.0);
        f.set(ModeTuple::from({static_cast<ModeTuple::Index>(lat->index_of(-k))}), 1.0);
        obs.emplace_back(f);
    } else {
        const auto count = static_cast<std::size_t>(ctx.config.integer("ito.count", 1, 10000, 20));
        const int level = static_cast<int>(ctx.config.integer("ito.level", 1, 6, 2));
        const auto support = static_cast<std::size_t>(ctx.config.integer("ito.support", 1, 100000, 4));
        Rng rng = derived_rng(ctx.settings.seed ^ 0x9e3779b97f4a7c15ULL, 0);
        for (std::size_t j = 0; j < count; ++j) obs.emplace_back(hermitian_part(random_kernel(lat, level, support, rng)));
    }
    const auto reps = ito_bound_check(obs, sim);

    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header({"observable", "lhs_sup", "lhs_sup_stderr", "lhs_terminal", "lhs_terminal_stderr", "rhs", "ratio_sup"});
    double worst = 0.0;
    for (std::size_t j = 0; j < reps.size(); ++j) {
        const auto& r = reps[j];
        const double ratio = r.rhs > 0 ? r.lhs_sup / r.rhs : 0.0;
        worst = std::max(worst, ratio);
        csv.cell(j).cell(r.lhs_sup).cell(r.lhs_sup_stderr).cell(r.lhs_terminal).cell(r.lhs_terminal_stderr).cell(r.rhs).cell(ratio).end_row();
    }
    ctx.log << "ito-check: " << reps.size() << " observables, max lhs/rhs " << worst << "\n";
}

void cmd_diffusivity(Context& ctx) {
    const auto sim = read_sim(ctx.config, ctx.settings);
    const auto times = ctx.config.reals("diffusivity.times", 0.0, sim.final_time());
    const auto stride = static_cast<std::size_t>(ctx.config.integer("diffusivity.lag_stride", 1, 1'000'000, 1));
    const auto ds = bulk_diffusivity(sim, times, stride);
    {
        auto os = ctx.out.open();
        CsvWriter csv(os);
        csv.header({"t", "d_bulk", "std_err", "wide_errors"});
        for (std::size_t j = 0; j < ds.t.size(); ++j)
            csv.cell(ds.t[j]).cell(ds.d[j]).cell(ds.std_err[j]).cell(ds.wide_errors ? 1 : 0).end_row();
    }
    if (!ctx.config.has("diffusivity.correlation")) return;

    const int d = sim.lattice->dim();
    const Mode k = read_mode(ctx.config, "diffusivity.correlation.k", d);
    const auto lags = ctx.config.reals("diffusivity.correlation.lags", 0.0, sim.final_time());
    const double floor = ctx.config.real("diffusivity.correlation.fit_floor", 0.0, 1.0, 0.1);
    const auto cs = mode_correlation(sim, k, lags, floor);

    auto oc = ctx.out.open("correlation");
    CsvWriter cc(oc);
    cc.header({"lag", "re", "im", "std_err"});
    for (std::size_t j = 0; j < cs.lags.size(); ++j)
        cc.cell(cs.lags[j]).cell(cs.values[j].real()).cell(cs.values[j].imag()).cell(cs.std_err[j]).end_row();

    auto orate = ctx.out.open("rate");
    CsvWriter rc(orate);
    rc.header(concat(mode_columns(d), {"rate", "rate_stderr", "fit_points", "predicted_rate", "relative_error",
                                       "wide_errors"}));
    mode_cells(rc, k);
    rc.cell(cs.rate).cell(cs.rate_stderr).cell(cs.fit_points);
    if (d == 2) {
        const double wk = sim.spec.w_dot(k);
        const double predicted = 0.5 * (static_cast<double>(k.norm2()) + d_she(sim.spec.w_norm2()) * wk * wk);
        rc.cell(predicted).cell(std::abs(cs.rate - predicted) / predicted);
    } else {
        rc.cell("").cell("");
    }
    rc.cell(cs.wide_errors ? 1 : 0).end_row();
    ctx.log << "diffusivity: correlation rate " << cs.rate << " +- " << cs.rate_stderr << "\n";
}

// ------------------------------------------------------------------- fock

void cmd_fock_verify(Context& ctx) {
    const auto lat = read_lattice(ctx.config);
    const auto spec = read_spec(ctx.config, *lat);
    const int max_level = static_cast<int>(ctx.config.integer("fock.max_level", 2, 6, 3));
    const auto rep = verify_operator_algebra(lat, spec, max_level, ctx.settings.dense_budget());

    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header({"level", "sector", "domain_size", "codomain_size", "adjoint_defect", "commutator_defect"});
    for (const auto& b : rep.blocks)
        csv.cell(b.level)
            .cell(b.momentum ? b.momentum->str() : std::string("all"))
            .cell(b.domain_size)
            .cell(b.codomain_size)
            .cell(b.adjoint_defect)
            .cell(b.commutator_defect)
            .end_row();
    ctx.log << "fock-verify: adjoint defect " << rep.max_adjoint_defect << ", commutator defect "
            << rep.max_commutator_defect << "\n";
}

void cmd_generator_solve(Context& ctx) {
    const auto lat = read_lattice(ctx.config);
    const auto spec = read_spec(ctx.config, *lat);
    const Mode k = ctx.config.has("generator.k") ? read_mode(ctx.config, "generator.k", lat->dim()) : unit_mode(lat->dim());
    if (!lat->contains(k)) throw ConfigError("key 'generator.k' must be a lattice mode");
    const int low = static_cast<int>(ctx.config.integer("generator.low", 2, 2, 2));
    const auto highs = ctx.config.integers("generator.highs", low, 12);
    const bool oracle = ctx.config.boolean("generator.oracle", true);
    const double power = ctx.config.real("generator.apriori_power", 0.0, 4.0, 1.0);
    const ChaosVector g(apply_Aplus(FockKernel::unit(lat, {k}), spec));

    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header({"high", "max_residual", "oracle_difference", "apriori_ratio"});
    auto ol = ctx.out.open("levels");
    CsvWriter lc(ol);
    lc.header({"high", "level", "residual"});
    for (long long high : highs) {
        const TruncatedSystem sys{spec, low, static_cast<int>(high), g};
        const auto sol = solve_truncated(sys, {ctx.settings.dense_budget(), oracle});
        csv.cell(high).cell(sol.max_residual);
        if (sol.oracle_difference)
            csv.cell(*sol.oracle_difference);
        else
            csv.cell("");
        csv.cell(apriori_ratio(sol.u, g, power)).end_row();
        for (std::size_t j = 0; j < sol.residuals.size(); ++j)
            lc.cell(high).cell(low + static_cast<int>(j)).cell(sol.residuals[j]).end_row();
        ctx.log << "generator-solve: n = " << high << ", residual " << sol.max_residual << "\n";
    }
}

// ------------------------------------------------------------- replacement

void cmd_replacement_sweep(Context& ctx) {
    expect_dim(ctx.config, 2, "replacement-sweep");
    const auto w = read_w(ctx.config, 2);
    const auto cutoffs = ctx.config.reals("replacement.cutoffs", 2.0, 1e5);

    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header({"M", "lambda2", "max_deviation", "max_deviation_over_lambda2", "k0", "k1"});
    auto osamp = ctx.out.open("samples");
    CsvWriter sc(osamp);
    sc.header({"M", "k0", "k1", "psi", "g_of_L", "deviation"});
    for (double M : cutoffs) {
        const auto samples = psi_deviation(M, w);
        const double lambda2 = std::pow(lambda_eps(2, M), 2);
        const PsiSample* worst = &samples.front();
        for (const auto& s : samples) {
            if (s.deviation > worst->deviation) worst = &s;
            sc.cell(M);
            mode_cells(sc, s.k);
            sc.cell(s.psi).cell(s.g_of_L).cell(s.deviation).end_row();
        }
        csv.cell(M).cell(lambda2).cell(worst->deviation).cell(worst->deviation / lambda2);
        mode_cells(csv, worst->k);
        csv.end_row();
        ctx.log << "replacement-sweep: M = " << M << ", max deviation / lambda^2 = " << worst->deviation / lambda2 << "\n";
    }
}

void cmd_fdt_residuals(Context& ctx) {
    expect_dim(ctx.config, 2, "fdt-residuals");
    const auto w = read_w(ctx.config, 2);
    const auto cutoffs = ctx.config.reals("fdt.cutoffs", 2.0, 1e5);
    const std::string input = ctx.config.choice("fdt.input", {"e10", "pair"}, "e10");
    const int in_level = input == "e10" ? 1 : 2;
    const int low = static_cast<int>(ctx.config.integer("fdt.low", in_level + 1, in_level + 1, in_level + 1));
    const int high = static_cast<int>(ctx.config.integer("fdt.high", low, 12, low));
    const std::optional<int> l2_high =
        ctx.config.has("fdt.l2_high") ? std::optional<int>(static_cast<int>(ctx.config.integer("fdt.l2_high", low, 12)))
                                      : std::nullopt;
    const auto budget = ctx.settings.sparse_budget();

    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header({"M", "lambda", "diff", "l2", "l2_over_lambda", "h1"});
    for (double M : cutoffs) {
        auto lat = make_lattice(2, M);
        const auto spec = weak_coupling(*lat, w);
        const auto e10 = FockKernel::unit(lat, {Mode{1, 0}});
        const FockKernel f = input == "e10" ? e10 : symmetric_product(e10, FockKernel::unit(lat, {Mode{0, 1}}));
        const auto sol = solve_replacement_eq(f, low, high, spec, budget);
        const auto res = fdt_residuals(sol, spec, budget);
        const double l2 = l2_high ? replacement_l2_streamed(f, low, *l2_high, spec, budget) : res.l2;
        csv.cell(M).cell(spec.coupling).cell(res.diff).cell(l2).cell(l2 / spec.coupling);
        if (res.h1)
            csv.cell(*res.h1);
        else
            csv.cell("");
        csv.end_row();
        ctx.log << "fdt-residuals: M = " << M << ", diff " << res.diff << ", l2/lambda " << l2 / spec.coupling << "\n";
    }
}

// ------------------------------------------------------------------ paths

void cmd_paths_d3(Context& ctx) {
    expect_dim(ctx.config, 3, "paths-d3");
    const auto w = read_w(ctx.config, 3);
    const auto cutoffs = ctx.config.reals("paths.cutoffs", 2.0, 1e4);
    const Mode k = ctx.config.has("paths.k") ? read_mode(ctx.config, "paths.k", 3) : unit_mode(3);
    const auto norm = parse_norm_kind(ctx.config.choice("lattice.norm", {"euclidean", "sup"}, "sup"));
    {
        auto oc = ctx.out.open("constants");
        CsvWriter cc(oc);
        cc.header({"dim", "integral_I", "c3", "target"});
        cc.cell(3).cell(integral_I(3)).cell(c3_constant(3)).cell(integral_I(3) * c3_constant(3)).end_row();
    }
    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header({"M", "d_path", "target", "relative_error", "diagonal", "predicted", "off_diagonal_norm2", "direct_term",
                "direct_over_eps2"});
    for (double M : cutoffs) {
        auto euclid = make_lattice(3, M, NormKind::euclidean);
        const auto dp = d_path_121(*euclid, weak_coupling(*euclid, w), k);
        auto lat = make_lattice(3, M, norm);
        const auto spec = weak_coupling(*lat, w);
        const auto diag = diagonal_split(k, lat, spec);
        const auto dt = direct_term(k, *lat, spec);
        csv.cell(M).cell(dp.value).cell(dp.target).cell(dp.relative_error).cell(diag.diagonal.real()).cell(diag.predicted)
            .cell(diag.off_diagonal_norm2).cell(dt.value).cell(dt.over_eps2).end_row();
        ctx.log << "paths-d3: M = " << M << ", d_path " << dp.value << " (target " << dp.target << ")\n";
    }
}

void cmd_resolvent_check(Context& ctx) {
    const auto lat = read_lattice(ctx.config);
    const auto spec = read_spec(ctx.config, *lat);
    const int low = static_cast<int>(ctx.config.integer("resolvent.low", 1, 10, 2));
    const int high = static_cast<int>(ctx.config.integer("resolvent.high", low, 12, low + 1));
    const Mode p = read_mode(ctx.config, "resolvent.momentum", lat->dim());
    const auto horizons = ctx.config.integers("resolvent.horizons", 1, 200);
    const auto op = band_t_operator(lat, low, high, p, spec, ctx.settings.dense_budget());
    if (op.T.rows() == 0) throw ConfigError("key 'resolvent.momentum' selects an empty sector");

    Rng rng = derived_rng(ctx.settings.seed, 0);
    std::normal_distribution<double> g;
    Eigen::VectorXcd b(op.T.rows());
    for (auto& x : b) x = Complex(g(rng), g(rng));

    auto os = ctx.out.open();
    CsvWriter csv(os);
    csv.header({"horizon", "dimension", "discrepancy", "residual"});
    for (long long S : horizons) {
        const auto r = resolvent_identity_check(op, b, static_cast<int>(S));
        csv.cell(S).cell(r.dimension).cell(r.discrepancy).cell(r.residual).end_row();
        ctx.log << "resolvent-check: S = " << S << ", discrepancy " << r.discrepancy << "\n";
    }
}

std::string utc_stamp(std::chrono::system_clock::time_point t, const char* fmt) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, fmt);
    return os.str();
}

void write_manifest(const OutputSet& out, const json& manifest) {
    std::ofstream os(out.manifest_path(), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + out.manifest_path().string());
    os << manifest.dump(2) << "\n";
}

}  // namespace

const std::vector<CommandInfo>& command_table() {
    static const std::vector<CommandInfo> table{
        {"simulate", "run replicas and write field snapshots", cmd_simulate},
        {"stationarity", "per-mode second moments along the run", cmd_stationarity},
        {"ito-check", "additive-functional moments against the H^-1 bound", cmd_ito_check},
        {"diffusivity", "bulk diffusivity and mode correlation decay", cmd_diffusivity},
        {"fock-verify", "adjoint and momentum identities on dense assemblies", cmd_fock_verify},
        {"generator-solve", "truncated generator equation with residuals", cmd_generator_solve},
        {"replacement-sweep", "Psi against G(L) over a list of cutoffs", cmd_replacement_sweep},
        {"fdt-residuals", "replacement equation residuals over a list of cutoffs", cmd_fdt_residuals},
        {"paths-d3", "path diffusivity and diagram split in d=3", cmd_paths_d3},
        {"resolvent-check", "resolvent against its exponential integral", cmd_resolvent_check},
    };
    return table;
}

int run(const Invocation& inv, std::ostream& log, std::ostream& err) {
    const CommandInfo* cmd = nullptr;
    for (const auto& c : command_table())
        if (c.name == inv.command) cmd = &c;
    if (!cmd) {
        err << "unknown command '" << inv.command << "'\n";
        return kConfigError;
    }

    std::optional<Config> config;
    RunSettings settings;
    try {
        config.emplace(Config::load(inv.config_path));
        settings = resolve_settings(*config, inv.overrides);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    std::error_code ec;
    std::filesystem::create_directories(inv.out_dir, ec);
    const auto start = std::chrono::system_clock::now();
    std::string stem = inv.command + "-" + utc_stamp(start, "%Y%m%dT%H%M%SZ");
    for (int n = 1; std::filesystem::exists(inv.out_dir / (stem + ".json")); ++n)
        stem = inv.command + "-" + utc_stamp(start, "%Y%m%dT%H%M%SZ") + "-" + std::to_string(n);
    OutputSet out(inv.out_dir, stem);

    json manifest{
        {"command", inv.command},
        {"config_path", inv.config_path.string()},
        {"config", json::parse(config->to_json())},
        {"seed", settings.seed},
        {"threads", settings.threads},
        {"budget_mb", settings.budget_mb},
        {"git_hash", BURGERS_GIT_HASH},
        {"started_utc", utc_stamp(start, "%Y-%m-%dT%H:%M:%SZ")},
        {"status", "running"},
    };
    try {
        write_manifest(out, manifest);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kFailure;
    }

    int code = kOk;
    std::string message;
    try {
        Context ctx{*config, settings, out, log};
        cmd->handler(ctx);
    } catch (const ConfigError& e) {
        code = kConfigError;
        message = std::string("config error: ") + e.what();
    } catch (const BudgetExceeded& e) {
        code = kBudgetError;
        message = std::string("budget exceeded: ") + e.what();
    } catch (const std::invalid_argument& e) {
        code = kConfigError;
        message = std::string("invalid input: ") + e.what();
    } catch (const std::domain_error& e) {
        code = kConfigError;
        message = std::string("invalid input: ") + e.what();
    } catch (const std::exception& e) {
        code = kFailure;
        message = std::string("error: ") + e.what();
    }
    if (code != kOk) err << message << "\n";

    const double wall = std::chrono::duration<double>(std::chrono::system_clock::now() - start).count();
    manifest["status"] = code == kOk ? "ok" : "failed";
    manifest["exit_code"] = code;
    if (!message.empty()) manifest["message"] = message;
    manifest["wall_time_s"] = wall;
    json files = json::array();
    for (const auto& f : out.files()) files.push_back(f.filename().string());
    manifest["outputs"] = files;
    try {
        write_manifest(out, manifest);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        if (code == kOk) code = kFailure;
    }
    return code;
}

}  // namespace cli
