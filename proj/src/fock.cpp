#include "burgers/fock.hpp"

#include "burgers/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace burgers {

namespace {

void check_level(int n) {
    if (n < 0 || n > kMaxLevel)
        throw std::invalid_argument("chaos level must be in [0, " + std::to_string(kMaxLevel) + "]");
}

}  // namespace

ModeTuple ModeTuple::from(std::span<const Index> indices) {
    check_level(static_cast<int>(indices.size()));
    ModeTuple t;
    t.n_ = static_cast<std::uint8_t>(indices.size());
    std::copy(indices.begin(), indices.end(), t.idx_.begin());
    std::sort(t.idx_.begin(), t.idx_.begin() + t.n_);
    return t;
}

ModeTuple ModeTuple::from(std::initializer_list<Index> indices) {
    return from(std::span<const Index>(indices.begin(), indices.size()));
}

ModeTuple ModeTuple::erase_at(int pos) const {
    ModeTuple t = *this;
    for (int i = pos; i + 1 < n_; ++i) t.idx_[static_cast<std::size_t>(i)] = idx_[static_cast<std::size_t>(i + 1)];
    t.idx_[static_cast<std::size_t>(n_ - 1)] = 0;
    --t.n_;
    return t;
}

ModeTuple ModeTuple::insert(Index v) const {
    if (n_ >= kMaxLevel) throw std::invalid_argument("chaos level exceeds the supported maximum");
    ModeTuple t = *this;
    int pos = n_;
    while (pos > 0 && t.idx_[static_cast<std::size_t>(pos - 1)] > v) {
        t.idx_[static_cast<std::size_t>(pos)] = t.idx_[static_cast<std::size_t>(pos - 1)];
        --pos;
    }
    t.idx_[static_cast<std::size_t>(pos)] = v;
    ++t.n_;
    return t;
}

int ModeTuple::count(Index v) const {
    int c = 0;
    for (int i = 0; i < n_; ++i) c += idx_[static_cast<std::size_t>(i)] == v;
    return c;
}

double factorial(int n) {
    static const auto table = [] {
        std::array<double, kMaxLevel + 2> f{};
        f[0] = 1.0;
        for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<double>(i);
        return f;
    }();
    if (n < 0 || n > kMaxLevel + 1) throw std::invalid_argument("factorial argument out of range");
    return table[static_cast<std::size_t>(n)];
}

double ModeTuple::orbit_size() const {
    double r = factorial(n_);
    int run = 1;
    for (int i = 1; i <= n_; ++i) {
        if (i < n_ && idx_[static_cast<std::size_t>(i)] == idx_[static_cast<std::size_t>(i - 1)]) {
            ++run;
        } else {
            r /= factorial(run);
            run = 1;
        }
    }
    return r;
}

std::strong_ordering operator<=>(const ModeTuple& a, const ModeTuple& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    for (int i = 0; i < a.n_; ++i)
        if (auto c = a.idx_[static_cast<std::size_t>(i)] <=> b.idx_[static_cast<std::size_t>(i)]; c != 0) return c;
    return std::strong_ordering::equal;
}

std::size_t ModeTuple::hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
    for (int i = 0; i < n_; ++i) {
        h ^= idx_[static_cast<std::size_t>(i)] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xbf58476d1ce4e5b9ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
}

Mode total_momentum(const ModeLattice& lattice, const ModeTuple& t) {
    const std::vector<int> zero(static_cast<std::size_t>(lattice.dim()), 0);
    Mode s{std::span<const int>(zero)};
    for (auto i : t.indices()) s = s + lattice.mode(i);
    return s;
}

double kinetic_energy(const ModeLattice& lattice, const ModeTuple& t) {
    long s = 0;
    for (auto i : t.indices()) s += lattice.norm2(i);
    return 0.5 * static_cast<double>(s);
}

FockKernel::FockKernel(LatticePtr lattice, int level) : lattice_(std::move(lattice)), level_(level) {
    check_level(level);
}

ModeTuple FockKernel::tuple_of(std::span<const Mode> modes) const {
    if (static_cast<int>(modes.size()) != level_) throw std::invalid_argument("tuple length does not match the level");
    std::array<ModeTuple::Index, kMaxLevel> idx{};
    for (std::size_t j = 0; j < modes.size(); ++j) idx[j] = static_cast<ModeTuple::Index>(lattice_->index_of(modes[j]));
    return ModeTuple::from(std::span<const ModeTuple::Index>(idx.data(), modes.size()));
}

FockKernel FockKernel::unit(LatticePtr lattice, std::span<const Mode> modes) {
    FockKernel f(std::move(lattice), static_cast<int>(modes.size()));
    f.set(f.tuple_of(modes), Complex(1.0));
    return f;
}

FockKernel FockKernel::unit(LatticePtr lattice, std::initializer_list<Mode> modes) {
    return unit(std::move(lattice), std::span<const Mode>(modes.begin(), modes.size()));
}

Complex FockKernel::value(const ModeTuple& t) const {
    auto it = values_.find(t);
    return it == values_.end() ? Complex{} : it->second;
}

Complex FockKernel::at(std::initializer_list<Mode> modes) const {
    for (const auto& k : modes)
        if (!lattice_->contains(k)) return {};
    return value(tuple_of(std::span<const Mode>(modes.begin(), modes.size())));
}

void FockKernel::set(const ModeTuple& t, Complex v) {
    if (t.level() != level_) throw std::invalid_argument("tuple level mismatch");
    values_[t] = v;
}

void FockKernel::add(const ModeTuple& t, Complex v) {
    if (t.level() != level_) throw std::invalid_argument("tuple level mismatch");
    values_[t] += v;
}

void FockKernel::prune(double tol) {
    std::erase_if(values_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

FockKernel& FockKernel::operator*=(Complex s) {
    for (auto& [t, v] : values_) v *= s;
    return *this;
}

FockKernel& FockKernel::operator+=(const FockKernel& other) {
    if (other.level_ != level_) throw std::invalid_argument("kernel level mismatch");
    for (const auto& [t, v] : other.values_) values_[t] += v;
    return *this;
}

FockKernel& FockKernel::operator-=(const FockKernel& other) {
    if (other.level_ != level_) throw std::invalid_argument("kernel level mismatch");
    for (const auto& [t, v] : other.values_) values_[t] -= v;
    return *this;
}

FockKernel symmetric_product(const FockKernel& phi, const FockKernel& psi) {
    if (phi.level() != 1 || psi.level() != 1) throw std::invalid_argument("symmetric_product takes level-1 kernels");
    FockKernel out(phi.lattice_ptr(), 2);
    auto value = [](const FockKernel& f, ModeTuple::Index i) { return f.value(ModeTuple::from({i})); };
    for (const auto& a : phi.values())
        for (const auto& b : psi.values()) {
            const auto t = ModeTuple::from({a.first[0], b.first[0]});
            out.set(t, 0.5 * (value(phi, t[0]) * value(psi, t[1]) + value(psi, t[0]) * value(phi, t[1])));
        }
    out.prune();
    return out;
}

ChaosVector::ChaosVector(LatticePtr lattice, int low, int high) : lattice_(std::move(lattice)), low_(low) {
    if (low < 0 || high < low) throw std::invalid_argument("chaos vector needs 0 <= low <= high");
    check_level(high);
    for (int n = low; n <= high; ++n) levels_.emplace_back(lattice_, n);
}

ChaosVector::ChaosVector(FockKernel single) : lattice_(single.lattice_ptr()), low_(single.level()) {
    levels_.push_back(std::move(single));
}

FockKernel& ChaosVector::level(int n) {
    if (!has_level(n)) throw std::out_of_range("chaos level " + std::to_string(n) + " not present");
    return levels_[static_cast<std::size_t>(n - low_)];
}

const FockKernel& ChaosVector::level(int n) const {
    if (!has_level(n)) throw std::out_of_range("chaos level " + std::to_string(n) + " not present");
    return levels_[static_cast<std::size_t>(n - low_)];
}

namespace {

ChaosVector widened(const ChaosVector& a, int low, int high) {
    ChaosVector r(a.lattice_ptr(), low, high);
    for (int n = a.low(); n <= a.high(); ++n) r.level(n) = a.level(n);
    return r;
}

}  // namespace

ChaosVector& ChaosVector::operator+=(const ChaosVector& other) {
    if (other.low() < low() || other.high() > high())
        *this = widened(*this, std::min(low(), other.low()), std::max(high(), other.high()));
    for (int n = other.low(); n <= other.high(); ++n) level(n) += other.level(n);
    return *this;
}

ChaosVector& ChaosVector::operator-=(const ChaosVector& other) {
    if (other.low() < low() || other.high() > high())
        *this = widened(*this, std::min(low(), other.low()), std::max(high(), other.high()));
    for (int n = other.low(); n <= other.high(); ++n) level(n) -= other.level(n);
    return *this;
}

ChaosVector& ChaosVector::operator*=(Complex s) {
    for (auto& f : levels_) f *= s;
    return *this;
}

Complex inner_product(const FockKernel& f, const FockKernel& g) {
    if (f.level() != g.level()) return {};
    const auto& small = f.size() <= g.size() ? f : g;
    CompensatedSum re, im;
    for (const auto& [t, v] : small.values()) {
        const Complex fv = f.value(t);
        const Complex gv = g.value(t);
        const Complex c = fock_weight(t) * fv * std::conj(gv);
        re.add(c.real());
        im.add(c.imag());
    }
    return {re.value(), im.value()};
}

Complex inner_product(const ChaosVector& f, const ChaosVector& g) {
    Complex s{};
    for (int n = std::max(f.low(), g.low()); n <= std::min(f.high(), g.high()); ++n)
        s += inner_product(f.level(n), g.level(n));
    return s;
}

double norm(const FockKernel& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }
double norm(const ChaosVector& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

FockKernel apply_multiplier(const FockKernel& f, const std::function<double(const ModeTuple&)>& m) {
    FockKernel out(f.lattice_ptr(), f.level());
    for (const auto& [t, v] : f.values()) out.set(t, m(t) * v);
    return out;
}

ChaosVector apply_multiplier(const ChaosVector& v, const std::function<double(const ModeTuple&)>& m) {
    ChaosVector out(v.lattice_ptr(), v.low(), v.high());
    for (int n = v.low(); n <= v.high(); ++n) out.level(n) = apply_multiplier(v.level(n), m);
    return out;
}

FockKernel apply_L0(const FockKernel& f) {
    const auto& lat = f.lattice();
    return apply_multiplier(f, [&](const ModeTuple& t) { return -kinetic_energy(lat, t); });
}

FockKernel apply_neg_L0_power(const FockKernel& f, double p) {
    const auto& lat = f.lattice();
    return apply_multiplier(f, [&](const ModeTuple& t) { return std::pow(kinetic_energy(lat, t), p); });
}

ChaosVector apply_neg_L0_power(const ChaosVector& v, double p) {
    const auto& lat = v.lattice();
    return apply_multiplier(v, [&](const ModeTuple& t) { return std::pow(kinetic_energy(lat, t), p); });
}

void for_each_split(const ModeLattice& lattice, std::size_t q,
                    const std::function<void(std::size_t, std::size_t)>& body) {
    const Mode& kq = lattice.mode(q);
    const int d = lattice.dim();
    const int R = lattice.radius();
    std::array<int, kMaxDim> lo{}, hi{};
    for (int a = 0; a < d; ++a) {
        lo[a] = std::max(-R, kq[a] - R);
        hi[a] = std::min(R, kq[a] + R);
    }
    Mode l = kq;
    for (int a = 0; a < d; ++a) l[a] = lo[a];
    for (;;) {
        const auto li = lattice.find(l);
        if (li != ModeLattice::npos) {
            const auto mi = lattice.find(kq - l);
            if (mi != ModeLattice::npos && li <= mi) body(static_cast<std::size_t>(li), static_cast<std::size_t>(mi));
        }
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++l[a] <= hi[a]) break;
            l[a] = lo[a];
        }
        if (a < 0) break;
    }
}

void push_Aplus(const ModeLattice& lattice, const NonlinearitySpec& spec, const ModeTuple& t,
                const std::function<void(const ModeTuple&, Complex)>& emit) {
    const int n = t.level();
    if (n == 0) return;
    const Complex pref = -2.0 * kI / fourier_volume_root(lattice.dim()) * (spec.coupling / (n + 1));
    for (int pos = 0; pos < n; ++pos) {
        if (pos > 0 && t[pos] == t[pos - 1]) continue;
        const auto q = t[pos];
        const double wq = spec.w_dot(lattice.mode(q));
        if (wq == 0.0) continue;
        const ModeTuple rest = t.erase_at(pos);
        for_each_split(lattice, q, [&](std::size_t l, std::size_t m) {
            const ModeTuple s = rest.insert(static_cast<ModeTuple::Index>(l)).insert(static_cast<ModeTuple::Index>(m));
            const int cl = s.count(static_cast<ModeTuple::Index>(l));
            const double pairs = l == m ? 0.5 * cl * (cl - 1) : static_cast<double>(cl) * s.count(static_cast<ModeTuple::Index>(m));
            emit(s, pref * (pairs * wq));
        });
    }
}

void push_Aminus(const ModeLattice& lattice, const NonlinearitySpec& spec, const ModeTuple& t,
                 const std::function<void(const ModeTuple&, Complex)>& emit) {
    const int n = t.level();
    if (n < 2) return;
    const Complex pref = -kI / fourier_volume_root(lattice.dim()) * (spec.coupling * n);
    for (int a = 0; a < n; ++a) {
        if (a > 0 && t[a] == t[a - 1]) continue;
        for (int b = a + 1; b < n; ++b) {
            if (b > a + 1 && t[b] == t[b - 1]) continue;
            const auto q = lattice.interacting_sum(t[a], t[b]);
            if (q == ModeLattice::npos) continue;
            const double wq = spec.w_dot(lattice.mode(static_cast<std::size_t>(q)));
            if (wq == 0.0) continue;
            const ModeTuple s = t.erase_at(b).erase_at(a).insert(static_cast<ModeTuple::Index>(q));
            const double mult = s.count(static_cast<ModeTuple::Index>(q)) * (t[a] == t[b] ? 1.0 : 2.0);
            emit(s, pref * (wq * mult));
        }
    }
}

FockKernel apply_Aplus(const FockKernel& f, const NonlinearitySpec& spec) {
    FockKernel out(f.lattice_ptr(), f.level() + 1);
    const auto& lat = f.lattice();
    for (const auto& [t, v] : f.values()) {
        if (v == Complex{}) continue;
        push_Aplus(lat, spec, t, [&](const ModeTuple& s, Complex c) { out.add(s, c * v); });
    }
    return out;
}

FockKernel apply_Aminus(const FockKernel& f, const NonlinearitySpec& spec) {
    FockKernel out(f.lattice_ptr(), std::max(0, f.level() - 1));
    if (f.level() < 2) return out;
    const auto& lat = f.lattice();
    for (const auto& [t, v] : f.values()) {
        if (v == Complex{}) continue;
        push_Aminus(lat, spec, t, [&](const ModeTuple& s, Complex c) { out.add(s, c * v); });
    }
    return out;
}

ChaosVector number_op(const ChaosVector& v) { return number_power(v, 1.0); }

ChaosVector number_power(const ChaosVector& v, double p) {
    ChaosVector out = v;
    for (int n = v.low(); n <= v.high(); ++n) out.level(n) *= std::pow(static_cast<double>(n), p);
    return out;
}

ChaosVector momentum_op(int axis, const ChaosVector& v) {
    const auto& lat = v.lattice();
    if (axis < 0 || axis >= lat.dim()) throw std::invalid_argument("momentum axis out of range");
    return apply_multiplier(v, [&](const ModeTuple& t) {
        double s = 0.0;
        for (auto i : t.indices()) s += lat.mode(i)[axis];
        return s;
    });
}

ChaosVector apply_generator(const ChaosVector& v, const NonlinearitySpec& spec) {
    const int low = std::max(1, v.low() - 1);
    const int high = v.high() + 1;
    ChaosVector out(v.lattice_ptr(), low, high);
    for (int n = v.low(); n <= v.high(); ++n) {
        const auto& f = v.level(n);
        if (n >= 1) out.level(n) += apply_L0(f);
        out.level(n + 1) += apply_Aplus(f, spec);
        if (n >= 2) out.level(n - 1) += apply_Aminus(f, spec);
    }
    return out;
}

FockKernel random_kernel(LatticePtr lattice, int level, std::size_t support, Rng& rng, std::optional<Mode> momentum) {
    if (level < 1) throw std::invalid_argument("random kernels need level >= 1");
    FockKernel f(lattice, level);
    const auto& lat = *lattice;
    std::uniform_int_distribution<std::size_t> pick(0, lat.size() - 1);
    std::normal_distribution<double> gauss;
    std::array<ModeTuple::Index, kMaxLevel> idx{};
    std::size_t attempts = 0;
    while (f.size() < support) {
        if (++attempts > 1000 * (support + 1)) throw std::runtime_error("could not draw a kernel in the requested sector");
        if (momentum) {
            Mode rest = *momentum;
            for (int j = 0; j + 1 < level; ++j) {
                idx[static_cast<std::size_t>(j)] = static_cast<ModeTuple::Index>(pick(rng));
                rest = rest - lat.mode(idx[static_cast<std::size_t>(j)]);
            }
            const auto last = lat.find(rest);
            if (last == ModeLattice::npos) continue;
            idx[static_cast<std::size_t>(level - 1)] = static_cast<ModeTuple::Index>(last);
        } else {
            for (int j = 0; j < level; ++j) idx[static_cast<std::size_t>(j)] = static_cast<ModeTuple::Index>(pick(rng));
        }
        const auto t = ModeTuple::from(std::span<const ModeTuple::Index>(idx.data(), static_cast<std::size_t>(level)));
        const double re = gauss(rng);
        const double im = gauss(rng);
        f.set(t, Complex(re, im));
    }
    return f;
}

FockKernel hermitian_part(const FockKernel& f) {
    const auto& lat = f.lattice();
    FockKernel out(f.lattice_ptr(), f.level());
    std::array<ModeTuple::Index, kMaxLevel> idx{};
    for (const auto& [t, v] : f.values()) {
        for (int j = 0; j < t.level(); ++j) idx[static_cast<std::size_t>(j)] = static_cast<ModeTuple::Index>(lat.negated(t[j]));
        const auto neg = ModeTuple::from(std::span<const ModeTuple::Index>(idx.data(), static_cast<std::size_t>(t.level())));
        out.add(t, 0.5 * v);
        out.add(neg, 0.5 * std::conj(v));
    }
    return out;
}

void write_csv(std::ostream& os, const FockKernel& f) {
    const auto& lat = f.lattice();
    const int d = lat.dim();
    std::vector<ModeTuple> tuples;
    tuples.reserve(f.size());
    for (const auto& kv : f.values()) tuples.push_back(kv.first);
    std::sort(tuples.begin(), tuples.end());
    CsvWriter csv(os);
    std::vector<std::string> names;
    for (int j = 0; j < f.level(); ++j)
        for (int a = 0; a < d; ++a) names.push_back("k" + std::to_string(j + 1) + "_" + std::to_string(a + 1));
    names.push_back("re");
    names.push_back("im");
    csv.header(names);
    for (const auto& t : tuples) {
        for (auto i : t.indices())
            for (int a = 0; a < d; ++a) csv.cell(lat.mode(i)[a]);
        const Complex v = f.value(t);
        csv.cell(v.real()).cell(v.imag());
        csv.end_row();
    }
}

}  // namespace burgers
