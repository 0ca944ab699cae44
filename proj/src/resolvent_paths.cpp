#include "burgers/resolvent_paths.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace burgers {

FockKernel t_operator(Sign sign, const FockKernel& f, const NonlinearitySpec& spec) {
    const FockKernel half = apply_neg_L0_power(f, -0.5);
    return apply_neg_L0_power(sign == Sign::plus ? apply_Aplus(half, spec) : apply_Aminus(half, spec), -0.5);
}

void PathSpec::validate() const {
    if (heights.size() < 2) throw std::invalid_argument("path needs at least one step");
    if (heights[0] != 1 || heights[1] != 2) throw std::invalid_argument("path must start 1, 2");
    for (std::size_t i = 1; i < heights.size(); ++i)
        if (std::abs(heights[i] - heights[i - 1]) != 1) throw std::invalid_argument("path steps must be +-1");
    for (std::size_t i = 1; i + 1 < heights.size(); ++i)
        if (heights[i] < 2 || heights[i] > band) throw std::invalid_argument("path interior leaves the band");
    if (heights.back() < 1) throw std::invalid_argument("path end below level 1");
}

std::vector<PathSpec> enumerate_paths(int length, int band, int end_height) {
    if (length < 1) throw std::invalid_argument("path length must be positive");
    std::vector<PathSpec> out;
    std::vector<int> h{1, 2};
    std::function<void()> extend = [&] {
        const int i = static_cast<int>(h.size()) - 1;
        if (i == length) {
            if (h.back() == end_height) out.push_back({h, band});
            return;
        }
        if (h.back() < 2 || h.back() > band) return;  // h.back() is interior
        if (std::abs(h.back() - end_height) > length - i) return;
        for (int step : {-1, 1}) {
            h.push_back(h.back() + step);
            extend();
            h.pop_back();
        }
    };
    extend();
    return out;
}

FockKernel apply_path(const PathSpec& path, const FockKernel& f, const NonlinearitySpec& spec) {
    path.validate();
    if (f.level() != path.heights[0]) throw std::invalid_argument("path start does not match the input level");
    FockKernel cur = f;
    for (std::size_t i = 1; i < path.heights.size(); ++i)
        cur = t_operator(path.heights[i] > path.heights[i - 1] ? Sign::plus : Sign::minus, cur, spec);
    return cur;
}

Complex c1_constant(int dim) { return 2.0 * kI / fourier_volume_root(dim); }

double c3_constant(int dim) { return 16.0 / std::pow(2.0 * kPi, dim); }

namespace {

void require_d3(const ModeLattice& lat) {
    if (lat.dim() < 3) throw std::invalid_argument("the path machinery needs d >= 3");
}

double direct_prefactor(const Mode& k, const ModeLattice& lat, const NonlinearitySpec& spec) {
    const double c1 = std::norm(c1_constant(lat.dim()));
    const double c2 = 2.0 / 3.0 * c1;
    const double lam = spec.coupling;
    const double wk = spec.w_dot(k);
    return 3.0 * c2 * c2 * std::pow(lam, 4) * wk * wk / static_cast<double>(k.norm2());
}

double sup_norm_sum(const Mode& k, const ModeLattice& lat, const NonlinearitySpec& spec) {
    const int d = lat.dim();
    const int R = lat.radius();
    const double Xmin = 3.0, Xmax = 3.0 * d * R * R;
    const double h = 0.2;
    const double lo = std::log(1.0 / Xmax) - 17.0, hi = std::log(2.0 / Xmin) + 4.5;
    std::vector<double> u;
    for (double x = lo; x <= hi; x += h) u.push_back(x);
    const std::size_t S = 2 * static_cast<std::size_t>(R) + 1;

    // g[a + R] = sum_b e^{-t (b^2 + (a-b)^2)} with b, a-b in [-R, R]
    auto g_table = [&](double t) {
        std::vector<double> g(S, 0.0);
        for (int a = -R; a <= R; ++a) {
            double s = 0.0;
            for (int b = std::max(-R, a - R); b <= std::min(R, a + R); ++b)
                s += std::exp(-t * (static_cast<double>(b) * b + static_cast<double>(a - b) * (a - b)));
            g[static_cast<std::size_t>(a + R)] = s;
        }
        return g;
    };

    auto weighted = [&](const std::vector<std::array<double, 3>>& m) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
            double p = spec.w[static_cast<std::size_t>(a)] * spec.w[static_cast<std::size_t>(a)] * m[static_cast<std::size_t>(a)][2];
            for (int b = 0; b < d; ++b)
                if (b != a) p *= m[static_cast<std::size_t>(b)][0];
            s += p;
            for (int b = a + 1; b < d; ++b) {
                double c = 2.0 * spec.w[static_cast<std::size_t>(a)] * spec.w[static_cast<std::size_t>(b)] *
                           m[static_cast<std::size_t>(a)][1] * m[static_cast<std::size_t>(b)][1];
                for (int e = 0; e < d; ++e)
                    if (e != a && e != b) c *= m[static_cast<std::size_t>(e)][0];
                s += c;
            }
        }
        return s;
    };

    const double wk = spec.w_dot(k);
    const double k2 = static_cast<double>(k.norm2());
    CompensatedSum total;
    std::vector<std::array<double, 3>> m1(static_cast<std::size_t>(d)), m2(static_cast<std::size_t>(d));
    for (double ut : u) {
        const double t = std::exp(ut);
        const auto g = g_table(t);
        double gk = 1.0;
        for (int a = 0; a < d; ++a) gk *= g[static_cast<std::size_t>(k[a] + R)];
        for (double uv : u) {
            const double tau = std::exp(uv);
            for (int a = 0; a < d; ++a) {
                std::array<double, 3> s1{}, s2{};
                for (int x = std::max(-R, k[a] - R); x <= std::min(R, k[a] + R); ++x) {
                    const double xd = x, k3 = k[a] - x;
                    const double base = std::exp(-(t + tau) * k3 * k3 - tau * xd * xd);
                    const double v1 = base * g[static_cast<std::size_t>(x + R)];
                    const double v2 = base * std::exp(-t * xd * xd);
                    s1[0] += v1, s1[1] += xd * v1, s1[2] += xd * xd * v1;
                    s2[0] += v2, s2[1] += xd * v2, s2[2] += xd * xd * v2;
                }
                m1[static_cast<std::size_t>(a)] = s1;
                m2[static_cast<std::size_t>(a)] = s2;
            }
            double F = weighted(m1) - 2.0 * weighted(m2);
            F -= wk * wk * std::exp(-tau * k2) * (gk - 2.0 * std::exp(-t * k2));
            total.add(F * t * t * tau * tau);
        }
    }
    return total.value() * h * h;
}

}  // namespace

DirectTerm direct_term_bruteforce(const Mode& k, const ModeLattice& lat, const NonlinearitySpec& spec) {
    require_d3(lat);
    CompensatedSum sum;
    for (std::size_t q = 0; q < lat.size(); ++q) {
        const auto k3 = lat.interacting_partner(k, q);
        if (k3 == ModeLattice::npos) continue;
        const Mode& mq = lat.mode(q);
        const double wq = spec.w_dot(mq);
        if (wq == 0.0) continue;
        const double q2 = static_cast<double>(mq.norm2());
        const double k32 = static_cast<double>(lat.norm2(static_cast<std::size_t>(k3)));
        const double Y = q2 + k32;
        double inner = 0.0;
        for (std::size_t a = 0; a < lat.size(); ++a) {
            const auto b = lat.interacting_partner(mq, a);
            if (b == ModeLattice::npos) continue;
            const double X = static_cast<double>(lat.norm2(a) + lat.norm2(static_cast<std::size_t>(b))) + k32;
            inner += 1.0 / (X * X);
        }
        sum.add(wq * wq * inner / (Y * Y));
    }
    const double v = direct_prefactor(k, lat, spec) * sum.value();
    return {v, v * lat.cutoff() * lat.cutoff()};
}

DirectTerm direct_term(const Mode& k, const ModeLattice& lat, const NonlinearitySpec& spec) {
    require_d3(lat);
    if (!lat.contains(k)) throw std::invalid_argument("direct term needs k in the lattice");
    if (lat.norm_kind() != NormKind::sup) return direct_term_bruteforce(k, lat, spec);
    const double v = direct_prefactor(k, lat, spec) * sup_norm_sum(k, lat, spec);
    return {v, v * lat.cutoff() * lat.cutoff()};
}

SecondOrderNorm double_creation_norm(const Mode& k, LatticePtr lattice, const NonlinearitySpec& spec) {
    const auto& lat = *lattice;
    const FockKernel first = t_operator(Sign::plus, FockKernel::unit(lattice, {k}), spec);
    const FockKernel pulled = apply_neg_L0_power(first, -0.5);
    const double tot = std::pow(norm(apply_neg_L0_power(t_operator(Sign::plus, first, spec), -0.5)), 2);

    const Complex pref = -2.0 * kI / fourier_volume_root(lat.dim()) * (spec.coupling / 3.0);
    CompensatedSum direct;
    for_each_tuple(lat, 3, k, [&](const ModeTuple& s) {
        const double e = kinetic_energy(lat, s);
        double part = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const auto q = lat.interacting_sum(s[a], s[b]);
                if (q == ModeLattice::npos) continue;
                const auto t = s.erase_at(b).erase_at(a).insert(static_cast<ModeTuple::Index>(q));
                const Complex c = pref * spec.w_dot(lat.mode(static_cast<std::size_t>(q))) * pulled.value(t) / e;
                part += std::norm(c);
            }
        direct.add(fock_weight(s) * part);
        return true;
    });
    return {tot, direct.value()};
}

double integral_I(int dim, int panels) {
    if (dim < 3) throw std::invalid_argument("the integral I diverges for d < 3");
    if (panels < 1) throw std::invalid_argument("quadrature needs at least one panel");
    const double surface = 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels, b = static_cast<double>(p + 1) / panels;
        s += boost::math::quadrature::gauss<double, 20>::integrate(
            [dim](double r) { return 0.5 * std::pow(r, dim - 3); }, a, b);
    }
    return surface * s;
}

namespace {

double pair_sum(const Mode& k, const ModeLattice& lat, double shift) {
    CompensatedSum sum;
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const auto m = lat.interacting_partner(k, l);
        if (m == ModeLattice::npos) continue;
        sum.add(1.0 / (static_cast<double>(lat.norm2(l) + lat.norm2(static_cast<std::size_t>(m))) + shift));
    }
    return sum.value();
}

}  // namespace

PathDiffusivity d_path_121(const ModeLattice& lat, const NonlinearitySpec& spec, const Mode& k) {
    require_d3(lat);
    if (!lat.contains(k)) throw std::invalid_argument("d_path needs k in the lattice");
    const double C3 = c3_constant(lat.dim());
    const double lam2 = spec.coupling * spec.coupling;
    const double sum = pair_sum(k, lat, 0.0);
    const double value = C3 * lam2 * sum;
    const double target = integral_I(lat.dim()) * C3;
    return {value, target, std::abs(value - target) / target, 0.5 * value};
}

DiagramReport diagonal_split(const Mode& k, LatticePtr lattice, const NonlinearitySpec& spec) {
    const auto& lat = *lattice;
    require_d3(lat);
    const FockKernel in = FockKernel::unit(lattice, {k, k});
    FockKernel out = t_operator(Sign::minus, t_operator(Sign::plus, in, spec), spec);
    const double kn = std::sqrt(static_cast<double>(k.norm2()));
    out *= kn;
    DiagramReport rep;
    rep.k = k;
    rep.eps = 1.0 / lat.cutoff();
    rep.diagonal = inner_product(in, out) / inner_product(in, in).real();
    FockKernel off = out;
    FockKernel proj = in;
    proj *= rep.diagonal;
    off -= proj;
    rep.off_diagonal_norm2 = std::pow(norm(off), 2);
    const double wk = spec.w_dot(k);
    rep.predicted = -0.5 * c3_constant(lat.dim()) * wk * wk / kn * spec.coupling * spec.coupling *
                    pair_sum(k, lat, static_cast<double>(k.norm2()));
    rep.momentum_conserved = true;
    const Mode twice = k + k;
    for (const auto& [t, v] : out.values())
        if (v != Complex{} && total_momentum(lat, t) != twice) rep.momentum_conserved = false;
    return rep;
}

double first_order_ratio(const FockKernel& psi, const NonlinearitySpec& spec) {
    const double num = std::pow(norm(apply_neg_L0_power(apply_Aplus(psi, spec), -1.0)), 2);
    const double den = psi.level() * std::pow(norm(apply_neg_L0_power(psi, 0.5)), 2);
    if (!(den > 0.0)) throw std::invalid_argument("first-order ratio needs a nonzero input");
    return num / den;
}

BandT band_t_operator(LatticePtr lattice, int low, int high, const Mode& momentum, const NonlinearitySpec& spec,
                      std::size_t budget) {
    BandT op{BandBasis::enumerate(std::move(lattice), low, high, momentum, budget), {}};
    const SparseMatrix A = assemble_band(op.band, spec, 0.0, 1.0);
    Eigen::VectorXd s(static_cast<Eigen::Index>(op.band.size()));
    for (int n = low; n <= high; ++n) {
        const auto& b = op.band.level(n);
        s.segment(static_cast<Eigen::Index>(op.band.offset(n)), static_cast<Eigen::Index>(b.size())) =
            b.energies().cwiseSqrt().cwiseInverse();
    }
    op.T = s.asDiagonal() * Eigen::MatrixXcd(A) * s.asDiagonal();
    return op;
}

namespace {

// e^{xT} u by scaled Taylor steps with ||xT / s||_1 <= 1/2.
Eigen::VectorXcd expm_action(const Eigen::MatrixXcd& T, double x, const Eigen::VectorXcd& u) {
    const double nrm = x * T.cwiseAbs().colwise().sum().maxCoeff();
    const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * nrm)));
    const double h = x / steps;
    Eigen::VectorXcd v = u;
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXcd term = v, acc = v;
        for (int m = 1; m <= 40; ++m) {
            term = (h / m) * (T * term);
            acc += term;
            if (term.norm() <= 1e-18 * acc.norm()) break;
        }
        v = acc;
    }
    return v;
}

}  // namespace

ResolventCheck resolvent_identity_check(const BandT& op, const Eigen::VectorXcd& b, int horizon) {
    if (horizon < 1) throw std::invalid_argument("quadrature horizon must be positive");
    const Eigen::Index n = op.T.rows();
    if (b.size() != n) throw std::invalid_argument("right-hand side does not match the band");
    const double bn = b.norm();
    if (!(bn > 0.0)) throw std::invalid_argument("right-hand side must be nonzero");
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::VectorXcd x1 = (I - op.T).partialPivLu().solve(b);

    // int_0^S e^{-s} e^{sT} b = sum_i w_i e^{-x_i} e^{x_i T} u,  u = sum_j e^{-j} e^{jT} b
    const Eigen::MatrixXcd step = op.T.exp();
    Eigen::VectorXcd v = b, u = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < horizon; ++j) {
        u += std::exp(-static_cast<double>(j)) * v;
        v = step * v;
    }
    using GL = boost::math::quadrature::gauss<double, 64>;
    const auto& xi = GL::abscissa();
    const auto& wi = GL::weights();
    Eigen::VectorXcd x2 = Eigen::VectorXcd::Zero(n);
    for (std::size_t i = 0; i < xi.size(); ++i)
        for (double sgn : {-1.0, 1.0}) {
            if (xi[i] == 0.0 && sgn > 0.0) continue;
            const double x = 0.5 * (1.0 + sgn * xi[i]);
            x2 += 0.5 * wi[i] * std::exp(-x) * expm_action(op.T, x, u);
        }
    return {(x1 - x2).norm() / bn, ((I - op.T) * x1 - b).norm() / bn, static_cast<std::size_t>(n)};
}

}  // namespace burgers
