#include "burgers/replacement.hpp"

#include "burgers/fock_dense.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace burgers {

namespace {

void require_d2(const ModeLattice& lattice) {
    if (lattice.dim() != 2) throw std::invalid_argument("the replacement machinery is two-dimensional");
}

double lambda2_of(double cutoff) { return 1.0 / std::log(cutoff * cutoff); }

}  // namespace

double L_eps(double x, double cutoff) {
    if (!(x >= 0.5)) throw std::domain_error("L_eps is defined on [1/2, inf)");
    if (!(cutoff > 1.0)) throw std::domain_error("L_eps requires M > 1");
    return lambda2_of(cutoff) * std::log1p(cutoff * cutoff / x);
}

double L_eps(double x, const ModeLattice& lattice) {
    require_d2(lattice);
    return L_eps(x, lattice.cutoff());
}

GFunction::GFunction(double w_norm2) : w2_(w_norm2) {
    if (!(w_norm2 >= 0.0) || !std::isfinite(w_norm2)) throw std::invalid_argument("|w|^2 must be finite and >= 0");
}

double GFunction::operator()(double x) const {
    if (w2_ == 0.0) return x / kPi;
    const double a = 3.0 * w2_ / (2.0 * kPi);
    if (!(1.0 + a * x > 0.0)) throw std::domain_error("G is undefined where 3|w|^2 x / 2pi + 1 <= 0");
    return std::expm1(2.0 / 3.0 * std::log1p(a * x)) / w2_;
}

double GFunction::derivative(double x) const {
    const double a = 3.0 * w2_ / (2.0 * kPi);
    return std::pow(1.0 + a * x, -1.0 / 3.0) / kPi;
}

double GFunction::ode_residual(double x) const {
    return std::abs(kPi * derivative(x) * std::sqrt(1.0 + w2_ * (*this)(x)) - 1.0);
}

double d_she(double w_norm2) { return GFunction(w_norm2)(1.0); }

double sigma_multiplier(const ModeTuple& t, const ModeLattice& lattice, const NonlinearitySpec& spec) {
    require_d2(lattice);
    double s2 = 0.0, w2 = 0.0;
    for (auto i : t.indices()) {
        const auto& k = lattice.mode(i);
        s2 += static_cast<double>(k.norm2());
        const double wk = spec.w_dot(k);
        w2 += wk * wk;
    }
    const GFunction G(spec.w_norm2());
    return 2.0 / (s2 + w2 * G(L_eps(0.5 * s2, lattice.cutoff())));
}

double sigma_multiplier(std::span<const Mode> modes, const ModeLattice& lattice, const NonlinearitySpec& spec) {
    require_d2(lattice);
    double s2 = 0.0, w2 = 0.0;
    for (const auto& k : modes) {
        s2 += static_cast<double>(k.norm2());
        const double wk = spec.w_dot(k);
        w2 += wk * wk;
    }
    const GFunction G(spec.w_norm2());
    return 2.0 / (s2 + w2 * G(L_eps(0.5 * s2, lattice.cutoff())));
}

double psi_eps(const Mode& k, const ModeLattice& lattice, const NonlinearitySpec& spec,
               std::span<const Mode> spectators) {
    require_d2(lattice);
    if (!lattice.contains(k)) throw std::invalid_argument("psi_eps needs k in the lattice");
    std::vector<Mode> modes(2 + spectators.size());
    std::copy(spectators.begin(), spectators.end(), modes.begin() + 2);
    CompensatedSum sum;
    for (const auto& l : lattice.modes()) {
        const Mode m = k - l;
        if (!lattice.contains(m)) continue;
        modes[0] = l;
        modes[1] = m;
        sum.add(sigma_multiplier(modes, lattice, spec));
    }
    return spec.coupling * spec.coupling / (kPi * kPi) * sum.value();
}

PsiEvaluator::PsiEvaluator(double cutoff, std::vector<double> w)
    : M_(cutoff), R_(static_cast<int>(std::floor(cutoff + 1e-9))), lambda2_(lambda2_of(cutoff)), w_(std::move(w)),
      G_([&] {
          double s = 0.0;
          for (double v : w_) s += v * v;
          return s;
      }()) {
    if (w_.size() != 2) throw std::invalid_argument("psi evaluator is two-dimensional");
    if (!(cutoff > 1.0)) throw std::domain_error("psi evaluator needs M > 1");
    table_.resize(static_cast<std::size_t>(2 * R_ * R_ + 1), 0.0);
    for (std::size_t S = 1; S < table_.size(); ++S) table_[S] = G_(L_eps(0.5 * static_cast<double>(S), M_));
}

double PsiEvaluator::g_of_L(double half_norm2) const { return G_(L_eps(half_norm2, M_)); }

double PsiEvaluator::operator()(const Mode& k) const {
    const long M2 = static_cast<long>(std::floor(M_ * M_ * (1.0 + 1e-12)));
    const int kx = k[0], ky = k[1];
    if (static_cast<long>(kx) * kx + static_cast<long>(ky) * ky > M2 || (kx == 0 && ky == 0))
        throw std::invalid_argument("psi evaluator needs k in the disc");
    CompensatedSum sum;
    for (int a = -R_; a <= R_; ++a) {
        const long rest_l = M2 - static_cast<long>(a) * a;
        const long ma = kx - a;
        const long rest_m = M2 - ma * ma;
        if (rest_l < 0 || rest_m < 0) continue;
        const int sl = static_cast<int>(std::floor(std::sqrt(static_cast<double>(rest_l)) + 1e-12));
        const int sm = static_cast<int>(std::floor(std::sqrt(static_cast<double>(rest_m)) + 1e-12));
        const int lo = std::max(-sl, ky - sm);
        const int hi = std::min(sl, ky + sm);
        double row = 0.0;
        for (int b = lo; b <= hi; ++b) {
            if ((a == 0 && b == 0) || (a == kx && b == ky)) continue;
            const long mb = ky - b;
            const long S = static_cast<long>(a) * a + static_cast<long>(b) * b + ma * ma + mb * mb;
            const double wl = w_[0] * a + w_[1] * b;
            const double wm = w_[0] * static_cast<double>(ma) + w_[1] * static_cast<double>(mb);
            row += 2.0 / (static_cast<double>(S) + (wl * wl + wm * wm) * table_[static_cast<std::size_t>(S)]);
        }
        sum.add(row);
    }
    return lambda2_ / (kPi * kPi) * sum.value();
}

std::vector<Mode> ray_sample(double cutoff) {
    std::set<Mode> out;
    const double M2 = cutoff * cutoff * (1.0 + 1e-12);
    for (double r = 1.0; r <= cutoff * (1.0 + 1e-12); r *= 2.0)
        for (int j = 0; j <= 4; ++j) {
            const double th = 0.5 * kPi * j / 4.0;
            const Mode k{static_cast<int>(std::lround(r * std::cos(th))), static_cast<int>(std::lround(r * std::sin(th)))};
            if (k.is_zero() || static_cast<double>(k.norm2()) > M2) continue;
            out.insert(k);
        }
    return {out.begin(), out.end()};
}

std::vector<PsiSample> psi_deviation(double cutoff, const std::vector<double>& w) {
    const PsiEvaluator psi(cutoff, w);
    std::vector<PsiSample> rows;
    for (const auto& k : ray_sample(cutoff)) {
        const double p = psi(k);
        const double g = psi.g_of_L(0.5 * static_cast<double>(k.norm2()));
        rows.push_back({k, p, g, std::abs(p - g)});
    }
    return rows;
}

namespace {

FockKernel apply_sigma(const FockKernel& f, const NonlinearitySpec& spec) {
    const auto& lat = f.lattice();
    return apply_multiplier(f, [&](const ModeTuple& t) { return sigma_multiplier(t, lat, spec); });
}

void check_budget(const FockKernel& f, std::size_t budget) {
    if (f.size() > budget) throw BudgetExceeded("replacement kernel at level " + std::to_string(f.level()), f.size(), budget);
}

// Upper estimate for the support of A+ f.
std::size_t aplus_support_estimate(const FockKernel& f) {
    return f.size() * static_cast<std::size_t>(f.level()) * (f.lattice().size() / 2 + 1);
}

}  // namespace

ReplacementSolution solve_replacement_eq(const FockKernel& f, int low, int high, const NonlinearitySpec& spec,
                                         std::size_t budget) {
    require_d2(f.lattice());
    if (low < 2) throw std::invalid_argument("replacement equation needs i >= 2");
    if (f.level() != low - 1) throw std::invalid_argument("input kernel must sit at level i-1");
    if (high < low) throw std::invalid_argument("replacement equation needs n >= i");
    ReplacementSolution sol{f, low, high, ChaosVector(f.lattice_ptr(), low, high)};
    const FockKernel* prev = &f;
    for (int j = low; j <= high; ++j) {
        if (aplus_support_estimate(*prev) > 50 * budget)
            throw BudgetExceeded("replacement kernel at level " + std::to_string(j), aplus_support_estimate(*prev), budget);
        sol.v.level(j) = apply_sigma(apply_Aplus(*prev, spec), spec);
        check_budget(sol.v.level(j), budget);
        prev = &sol.v.level(j);
    }
    return sol;
}

FdtResiduals fdt_residuals(const ReplacementSolution& sol, const NonlinearitySpec& spec, std::size_t budget) {
    const auto& f = sol.input;
    const auto& lat = f.lattice();
    const int i = sol.low, n = sol.high;
    FdtResiduals out{std::nullopt, norm(sol.v), 0.0};

    const double g1 = d_she(spec.w_norm2());
    FockKernel dterm = apply_Aminus(sol.v.level(i), spec);
    dterm -= apply_multiplier(f, [&](const ModeTuple& t) {
        double w2 = 0.0;
        for (auto k : t.indices()) w2 += std::pow(spec.w_dot(lat.mode(k)), 2);
        return -0.5 * w2 * g1;
    });
    out.diff = norm(apply_neg_L0_power(dterm, -0.5));

    if (aplus_support_estimate(sol.v.level(n)) > 10 * budget) return out;
    double h2 = 0.0;
    for (int j = i; j <= n; ++j) {
        FockKernel r = apply_L0(sol.v.level(j));
        r *= -1.0;
        r -= apply_Aplus(j == i ? f : sol.v.level(j - 1), spec);
        if (j < n) r -= apply_Aminus(sol.v.level(j + 1), spec);
        h2 += std::pow(norm(apply_neg_L0_power(r, -0.5)), 2);
    }
    const FockKernel top = apply_Aplus(sol.v.level(n), spec);
    if (top.size() > budget) return out;
    h2 += std::pow(norm(apply_neg_L0_power(top, -0.5)), 2);
    out.h1 = std::sqrt(h2);
    return out;
}

double replacement_l2_streamed(const FockKernel& f, int low, int high, const NonlinearitySpec& spec,
                               std::size_t budget) {
    const auto& lat = f.lattice();
    double total = 0.0;
    FockKernel prev = f;
    if (high > low) {
        const auto lower = solve_replacement_eq(f, low, high - 1, spec, budget);
        total = std::pow(norm(lower.v), 2);
        prev = lower.v.level(high - 1);
    } else {
        require_d2(lat);
        if (f.level() != low - 1) throw std::invalid_argument("input kernel must sit at level i-1");
    }
    const Complex pref = -2.0 * kI / fourier_volume_root(lat.dim()) * (spec.coupling / high);
    std::set<Mode> sectors;
    for (const auto& [t, v] : prev.values()) sectors.insert(total_momentum(lat, t));
    CompensatedSum top;
    for (const auto& P : sectors) {
        for_each_tuple(lat, high, P, [&](const ModeTuple& s) {
            Complex acc{};
            for (int a = 0; a < high; ++a)
                for (int b = a + 1; b < high; ++b) {
                    const auto q = lat.interacting_sum(s[a], s[b]);
                    if (q == ModeLattice::npos) continue;
                    const double wq = spec.w_dot(lat.mode(static_cast<std::size_t>(q)));
                    if (wq == 0.0) continue;
                    const auto t = s.erase_at(b).erase_at(a).insert(static_cast<ModeTuple::Index>(q));
                    acc += wq * prev.value(t);
                }
            if (acc != Complex{}) top.add(fock_weight(s) * std::norm(pref * acc * sigma_multiplier(s, lat, spec)));
            return true;
        });
    }
    return std::sqrt(total + top.value());
}

FockKernel replacement_defect(const FockKernel& psi, const NonlinearitySpec& spec) {
    const auto& lat = psi.lattice();
    const GFunction G(spec.w_norm2());
    FockKernel out = apply_Aminus(apply_sigma(apply_Aplus(psi, spec), spec), spec);
    out *= -1.0;
    out += apply_multiplier(psi, [&](const ModeTuple& t) {
        double w2 = 0.0;
        for (auto k : t.indices()) w2 += std::pow(spec.w_dot(lat.mode(k)), 2);
        return -0.5 * w2 * G(L_eps(kinetic_energy(lat, t), lat.cutoff()));
    });
    return out;
}

}  // namespace burgers
