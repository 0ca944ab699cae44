// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--cli PATH] [criterion ...]
//
// Exit status is 0 only when every selected criterion passes.

#include "burgers/fft_convolver.hpp"
#include "burgers/field.hpp"
#include "burgers/fock.hpp"
#include "burgers/fock_dense.hpp"
#include "burgers/generator_solver.hpp"
#include "burgers/replacement.hpp"
#include "burgers/resolvent_paths.hpp"
#include "burgers/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace burgers;

namespace {

enum class Verdict { pass, warn, fail };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string cli_path;

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double spread(const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
}

std::string join(const std::vector<double>& v, int digits = 4) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(x, digits);
    return s;
}

// 1. <N(eta), eta> = 0.
Outcome nonlinearity_orthogonality() {
    double worst = 0.0;
    for (int d : {2, 3})
        for (double M : {4.0, 8.0}) {
            auto lat = make_lattice(d, M);
            std::vector<double> w(static_cast<std::size_t>(d), 0.0);
            for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] = 1.0 / (1.0 + i);
            const auto spec = weak_coupling(*lat, w);
            FftConvolver fft(lat);
            for (int r = 0; r < 100; ++r) {
                Rng rng = derived_rng(1000 + static_cast<std::uint64_t>(10 * d + M), static_cast<std::uint64_t>(r));
                SpectralField eta(lat);
                fill_white_noise(eta, rng);
                const auto n = nonlinearity(eta, spec, fft);
                const double scale = std::sqrt(std::abs(pairing(n, n)) * std::abs(pairing(eta, eta)));
                worst = std::max(worst, std::abs(pairing(n, eta)) / scale);
            }
        }
    return {worst < 1e-11 ? Verdict::pass : Verdict::fail, "max relative |<N,eta>| = " + fmt(worst)};
}

// 2. Stationarity of white noise under the cutoff dynamics.
Outcome stationarity_check() {
    auto lat = make_lattice(2, 4.0);
    SimConfig c{lat, weak_coupling(*lat, {1.0, 0.0}), 0.02, 2.0, 10000, 2024, 1};
    const auto rep = stationarity(c, 10);
    const double modes = static_cast<double>(lat->size());
    double energy_z = 0.0;
    for (std::size_t j = 0; j < rep.times.size(); ++j)
        energy_z = std::max(energy_z, std::abs(rep.energy_mean[j] - modes) / rep.energy_stderr[j]);
    return {rep.max_z < 3.0 && rep.max_z_averaged < 3.0 ? Verdict::pass : Verdict::fail,
            "lambda " + fmt(c.spec.coupling) + ", max per-mode time-averaged z " + fmt(rep.max_z_averaged) +
                ", max z over (time, mode) " + fmt(rep.max_z) + " over " +
                std::to_string(rep.times.size() * rep.modes.size()) + " cells, energy z " + fmt(energy_z)};
}

// 3. A- = -(A+)^# and [P, A] = 0 on dense assemblies.
Outcome operator_algebra() {
    double adj = 0.0, com = 0.0;
    std::size_t blocks = 0;
    for (int d : {2, 3}) {
        auto lat = make_lattice(d, 2.0);
        std::vector<double> w(static_cast<std::size_t>(d), -0.3);
        w[0] = 1.0;
        const auto rep = verify_operator_algebra(lat, weak_coupling(*lat, w), 3);
        adj = std::max(adj, rep.max_adjoint_defect);
        com = std::max(com, rep.max_commutator_defect);
        blocks += rep.blocks.size();
    }
    return {adj < 1e-12 && com < 1e-12 ? Verdict::pass : Verdict::fail,
            std::to_string(blocks) + " blocks, adjoint defect " + fmt(adj) + ", commutator defect " + fmt(com)};
}

// 4. Graded sector condition with one constant.
Outcome graded_sector() {
    const double bound = 2.0;  // 2|w| for |w| = 1
    std::map<int, double> worst;
    for (int d : {2, 3}) {
        std::vector<double> w(static_cast<std::size_t>(d), 0.0);
        w[0] = 1.0;
        for (double M : {4.0, 8.0, 16.0}) {
            auto lat = make_lattice(d, M);
            const auto spec = weak_coupling(*lat, w);
            for (int n = 1; n <= 3; ++n) {
                Rng rng = derived_rng(4000 + static_cast<std::uint64_t>(100 * d + M), static_cast<std::uint64_t>(n));
                for (int r = 0; r < 50; ++r) {
                    const auto f = random_kernel(lat, n, 3, rng);
                    const double denom = std::sqrt(static_cast<double>(n)) * norm(apply_neg_L0_power(f, 0.5));
                    const double up = norm(apply_neg_L0_power(apply_Aplus(f, spec), -0.5)) / denom;
                    const double down = n > 1 ? norm(apply_neg_L0_power(apply_Aminus(f, spec), -0.5)) / denom : 0.0;
                    worst[d] = std::max({worst[d], up, down});
                }
            }
        }
    }
    const double m = std::max(worst[2], worst[3]);
    return {m <= bound ? Verdict::pass : Verdict::fail,
            "max ratio d=2 " + fmt(worst[2]) + ", d=3 " + fmt(worst[3]) + " against C = " + fmt(bound)};
}

// 5. Ito trick.
Outcome ito_trick() {
    auto lat = make_lattice(2, 2.0);
    SimConfig free{lat, NonlinearitySpec{{1.0, 0.0}, 0.0}, 0.02, 2.0, 20000, 5, 1};
    FockKernel f(lat, 1);
    f.set(ModeTuple::from({static_cast<ModeTuple::Index>(lat->index_of({1, 0}))}), 1.0);
    f.set(ModeTuple::from({static_cast<ModeTuple::Index>(lat->index_of({-1, 0}))}), 1.0);
    const auto analytic = ito_bound_check(ChaosVector(f), free);
    const double expect = 16.0 / std::exp(1.0);
    const double rel = std::abs(analytic.lhs_terminal - expect) / expect;

    auto lat4 = make_lattice(2, 4.0);
    SimConfig full{lat4, weak_coupling(*lat4, {1.0, 0.0}), 0.02, 2.0, 400, 6, 1};
    Rng rng = derived_rng(0x5eed, 0);
    std::vector<ChaosVector> obs;
    for (int j = 0; j < 20; ++j) obs.emplace_back(hermitian_part(random_kernel(lat4, 2, 4, rng)));
    double worst = 0.0;
    for (const auto& r : ito_bound_check(obs, full)) worst = std::max(worst, r.lhs_sup / r.rhs);

    const bool ok = rel < 0.05 && worst <= 10.0;
    return {ok ? Verdict::pass : Verdict::fail,
            "lambda=0: E|I_T|^2 = " + fmt(analytic.lhs_terminal) + " +- " + fmt(analytic.lhs_terminal_stderr, 2) +
                " vs 16/e = " + fmt(expect) + " (" + fmt(100 * rel, 2) + "%), sup " + fmt(analytic.lhs_sup) +
                " <= rhs " + fmt(analytic.rhs) + "; full dynamics max lhs/rhs " + fmt(worst) + " over 20"};
}

// 6. Truncated generator equation.
Outcome truncated_generator() {
    double res = 0.0, oracle = 0.0;
    std::vector<double> ratios;
    auto lat = make_lattice(2, 2.0);
    const auto spec = weak_coupling(*lat, {1.0, 0.0});
    const ChaosVector g(apply_Aplus(FockKernel::unit(lat, {Mode{1, 0}}), spec));
    for (int n = 3; n <= 5; ++n) {
        const auto sol = solve_truncated({spec, 2, n, g}, {kDefaultTupleBudget, true});
        res = std::max(res, sol.max_residual);
        oracle = std::max(oracle, *sol.oracle_difference);
        ratios.push_back(apriori_ratio(sol.u, g, 1.0));
    }
    const bool bounded = spread(ratios) <= 1.1;
    return {res < 1e-10 && oracle < 1e-9 && bounded ? Verdict::pass : Verdict::fail,
            "residual " + fmt(res) + ", oracle difference " + fmt(oracle) + ", a-priori ratios d=2 n=3..5 [" +
                join(ratios) + "]"};
}

// 7. G function and D_SHE.
Outcome g_function() {
    bool ok = GFunction(1.0)(0.0) == 0.0;
    double ode = 0.0, closed = 0.0;
    for (double wn : {0.5, 1.0, 2.0}) {
        const GFunction G(wn * wn);
        for (int i = 0; i <= 1000; ++i) ode = std::max(ode, G.ode_residual(i / 1000.0));
        const long double a = 3.0L * wn * wn / (2.0L * 3.14159265358979323846264338327950288L);
        const long double ref = (std::pow(1.0L + a, 2.0L / 3.0L) - 1.0L) / (wn * wn);
        closed = std::max(closed, static_cast<double>(std::abs(static_cast<long double>(d_she(wn * wn)) - ref)));
    }
    const double one = d_she(1.0);
    ok = ok && ode < 1e-12 && closed < 1e-10 && std::abs(one - 0.2972) < 5e-5;
    return {ok ? Verdict::pass : Verdict::fail,
            "G(0) = 0, ODE residual " + fmt(ode) + ", closed-form error " + fmt(closed) + ", D_SHE(|w|=1) = " + fmt(one, 7)};
}

// 8. Replacement deviation.
Outcome replacement_deviation() {
    std::vector<double> scaled;
    for (double M : {16.0, 64.0, 256.0, 1024.0}) {
        double worst = 0.0;
        for (const auto& s : psi_deviation(M, {1.0, 0.0})) worst = std::max(worst, s.deviation);
        scaled.push_back(worst / std::pow(lambda_eps(2, M), 2));
    }
    return {spread(scaled) <= 2.0 ? Verdict::pass : Verdict::fail,
            "max|Psi - G(L)| / lambda^2 at M = 16, 64, 256, 1024: " + join(scaled) + " (spread " + fmt(spread(scaled), 3) + ")"};
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

// 9. FDT residuals in d = 2.
Outcome fdt_residuals_check() {
    const std::vector<double> cutoffs{8.0, 16.0, 32.0, 64.0};
    std::vector<double> l2, diff1, diff2;
    for (double M : cutoffs) {
        auto lat = make_lattice(2, M);
        const auto spec = weak_coupling(*lat, {1.0, 0.0});
        const auto e10 = FockKernel::unit(lat, {Mode{1, 0}});
        l2.push_back(replacement_l2_streamed(e10, 2, 3, spec) / spec.coupling);
        diff1.push_back(fdt_residuals(solve_replacement_eq(e10, 2, 2, spec), spec).diff);
        const auto f2 = symmetric_product(e10, FockKernel::unit(lat, {Mode{0, 1}}));
        diff2.push_back(fdt_residuals(solve_replacement_eq(f2, 3, 3, spec), spec).diff);
    }
    const bool bounded = spread(l2) <= 2.0;
    const bool mono1 = strictly_decreasing(diff1), mono2 = strictly_decreasing(diff2);
    std::string detail = "M = 8..64: |v|/lambda [" + join(l2) + "]; diff e_(1,0) [" + join(diff1) + "]" +
                         (mono1 ? "" : " not decreasing") + "; diff f2 [" + join(diff2) + "]" +
                         (mono2 ? "" : " not decreasing");
    return {bounded && mono1 && mono2 ? Verdict::pass : Verdict::fail, detail};
}

// 10. d = 3 constants.
Outcome d3_constants() {
    const double I = integral_I(3);
    auto euclid = make_lattice(3, 64.0, NormKind::euclidean);
    const auto dp = d_path_121(*euclid, weak_coupling(*euclid, {1.0, 0.0, 0.0}), {1, 0, 0});
    std::vector<double> lm, lo;
    for (double M : {8.0, 16.0, 32.0}) {
        auto lat = make_lattice(3, M);
        const auto rep = diagonal_split({1, 0, 0}, lat, weak_coupling(*lat, {1.0, 0.0, 0.0}));
        lm.push_back(std::log(M));
        lo.push_back(std::log(rep.off_diagonal_norm2));
    }
    const double slope = -ls_slope(lm, lo);
    const bool ok = std::abs(I - 2.0 * kPi) < 1e-6 && dp.relative_error < 0.05 && std::abs(slope - 2.0) <= 0.3;
    return {ok ? Verdict::pass : Verdict::fail,
            "I - 2pi = " + fmt(I - 2.0 * kPi) + ", d_path(M=64) = " + fmt(dp.value, 6) + " vs 4/pi^2 = " +
                fmt(dp.target, 6) + " (" + fmt(100 * dp.relative_error, 3) + "%), off-diagonal decay exponent " +
                fmt(slope, 4)};
}

// 11. Resolvent as an exponential integral.
Outcome resolvent_identity() {
    auto lat = make_lattice(3, 2.0);
    const auto op = band_t_operator(lat, 2, 3, {2, 2, 2}, weak_coupling(*lat, {1.0, 0.0, 0.0}));
    Rng rng = derived_rng(11, 0);
    std::normal_distribution<double> g;
    Eigen::VectorXcd b(op.T.rows());
    for (auto& x : b) x = Complex(g(rng), g(rng));
    const auto r = resolvent_identity_check(op, b, 30);
    return {r.discrepancy < 1e-9 ? Verdict::pass : Verdict::fail,
            "dimension " + std::to_string(r.dimension) + ", discrepancy " + fmt(r.discrepancy) + ", residual " +
                fmt(r.residual)};
}

// 12. Correlation decay rate against 1/2 (|k|^2 + D_SHE (w.k)^2).
Outcome correlation_rate() {
    auto lat = make_lattice(2, 16.0);
    SimConfig c{lat, weak_coupling(*lat, {1.0, 0.0}), SimConfig::default_dt(16.0), 200.0, 32, 12, 1};
    std::vector<double> lags;
    for (int j = 0; j <= 30; ++j) lags.push_back(0.1 * j);
    const auto cs = mode_correlation(c, {1, 0}, lags, 0.1);
    const double target = 0.5 * (1.0 + d_she(1.0));
    const double rel = std::abs(cs.rate - target) / target;
    const Verdict v = rel <= 0.20 ? Verdict::pass : rel <= 0.35 ? Verdict::warn : Verdict::fail;
    return {v, "rate " + fmt(cs.rate, 5) + " +- " + fmt(cs.rate_stderr, 2) + " vs " + fmt(target, 5) + " (" +
                   fmt(100 * rel, 3) + "%, converges logarithmically in M)"};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// csv name (minus timestamp) -> contents
std::map<std::string, std::string> csv_outputs(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        std::string name = e.path().filename().string();
        const auto z = name.find('Z');
        out[name.substr(0, name.find('-')) + name.substr(z + 1)] = slurp(e.path());
    }
    return out;
}

// 13. Byte-identical CSV output from repeated CLI runs.
Outcome reproducibility() {
    if (cli_path.empty() || !std::filesystem::exists(cli_path)) return {Verdict::fail, "command-line tool not found"};
    const auto root = std::filesystem::temp_directory_path() / ("burgers-acceptance-" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);
    const auto cfg = root / "run.toml";
    {
        std::ofstream os(cfg);
        os << "[lattice]\nd = 2\nM = 4\n\n[nonlinearity]\nw = [1.0, 0.5]\n\n"
              "[run]\nhorizon = 0.4\ndt = 0.02\nreplicas = 40\nseed = 77\n\n"
              "[simulate]\nsample_every = 5\n\n[stationarity]\nsample_every = 2\n\n"
              "[replacement]\ncutoffs = [16, 32]\n";
    }
    std::vector<std::map<std::string, std::string>> runs;
    for (int threads : {1, 2}) {
        for (int rep = 0; rep < 2; ++rep) {
            const auto dir = root / ("t" + std::to_string(threads) + "-" + std::to_string(rep));
            for (const char* cmd : {"simulate", "stationarity", "replacement-sweep"}) {
                const std::string line = "\"" + cli_path + "\" " + cmd + " --config \"" + cfg.string() + "\" --out \"" +
                                         dir.string() + "\" --threads " + std::to_string(threads) + " > /dev/null";
                if (std::system(line.c_str()) != 0) return {Verdict::fail, std::string(cmd) + " exited with an error"};
            }
            runs.push_back(csv_outputs(dir));
        }
    }
    std::size_t files = runs.front().size();
    bool same = files > 0;
    for (const auto& r : runs) same = same && r == runs.front();
    std::filesystem::remove_all(root);
    return {same ? Verdict::pass : Verdict::fail,
            std::to_string(files) + " CSV files, 4 runs (2 per thread count) " + (same ? "identical" : "differ")};
}

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc)
            cli_path = argv[++i];
        else
            selected.insert(std::stoi(a));
    }
    const std::vector<Criterion> all{
        {1, "nonlinearity orthogonality", nonlinearity_orthogonality},
        {2, "stationarity", stationarity_check},
        {3, "operator algebra", operator_algebra},
        {4, "graded sector condition", graded_sector},
        {5, "Ito trick", ito_trick},
        {6, "truncated generator equation", truncated_generator},
        {7, "G function", g_function},
        {8, "replacement deviation", replacement_deviation},
        {9, "FDT residuals d=2", fdt_residuals_check},
        {10, "d=3 constants", d3_constants},
        {11, "resolvent identity", resolvent_identity},
        {12, "correlation decay rate", correlation_rate},
        {13, "reproducibility", reproducibility},
    };
    int failures = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Verdict::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = o.verdict == Verdict::fail ? "FAIL" : "PASS";
        if (o.verdict == Verdict::fail) ++failures;
        std::cout << tag << " " << c.id << " " << c.name << ": " << o.detail
                  << (o.verdict == Verdict::warn ? " [warning: outside 20%, within 35%]" : "") << " (" << fmt(secs, 3)
                  << " s)" << std::endl;
    }
    return failures ? 1 : 0;
}
