#include "burgers/lattice.hpp"

#include "burgers/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace burgers {

std::string to_string(NormKind kind) {
    return kind == NormKind::euclidean ? "euclidean" : "sup";
}

NormKind parse_norm_kind(const std::string& name) {
    if (name == "euclidean") return NormKind::euclidean;
    if (name == "sup") return NormKind::sup;
    throw std::invalid_argument("norm must be 'euclidean' or 'sup', got '" + name + "'");
}

Mode::Mode(std::initializer_list<int> components)
    : Mode(std::span<const int>(components.begin(), components.size())) {}

Mode::Mode(std::span<const int> components) {
    if (components.size() > static_cast<std::size_t>(kMaxDim))
        throw std::invalid_argument("mode dimension exceeds 5");
    dim_ = static_cast<int>(components.size());
    std::copy(components.begin(), components.end(), c_.begin());
}

bool Mode::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](int v) { return v == 0; });
}

long Mode::norm2() const {
    long s = 0;
    for (int a = 0; a < dim_; ++a) s += static_cast<long>(c_[a]) * c_[a];
    return s;
}

int Mode::sup_norm() const {
    int s = 0;
    for (int a = 0; a < dim_; ++a) s = std::max(s, std::abs(c_[a]));
    return s;
}

double Mode::dot(std::span<const double> w) const {
    double s = 0.0;
    const auto n = std::min<std::size_t>(w.size(), static_cast<std::size_t>(dim_));
    for (std::size_t a = 0; a < n; ++a) s += w[a] * c_[a];
    return s;
}

Mode Mode::operator-() const {
    Mode r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

Mode operator+(const Mode& a, const Mode& b) {
    Mode r = a;
    for (int i = 0; i < kMaxDim; ++i) r.c_[i] += b.c_[i];
    r.dim_ = std::max(a.dim_, b.dim_);
    return r;
}

Mode operator-(const Mode& a, const Mode& b) { return a + (-b); }

std::strong_ordering operator<=>(const Mode& a, const Mode& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    for (int i = 0; i < kMaxDim; ++i)
        if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
    return std::strong_ordering::equal;
}

std::string Mode::str() const {
    std::ostringstream os;
    os << '(';
    for (int a = 0; a < dim_; ++a) os << (a ? "," : "") << c_[a];
    os << ')';
    return os.str();
}

double fourier_volume_root(int dim) { return std::pow(2.0 * kPi, 0.5 * dim); }

NormKind default_norm(int dim) { return dim == 2 ? NormKind::euclidean : NormKind::sup; }

double lambda_eps(int dim, double cutoff) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("dimension must be in {2,3,4,5}");
    if (!(cutoff > 1.0)) throw std::domain_error("coupling requires cutoff M > 1");
    if (dim == 2) return 1.0 / std::sqrt(std::log(cutoff * cutoff));
    return std::pow(cutoff, 1.0 - 0.5 * dim);
}

LatticeGeometry LatticeGeometry::make(int dim, double cutoff) {
    return make(dim, cutoff, default_norm(dim));
}

LatticeGeometry LatticeGeometry::make(int dim, double cutoff, NormKind norm) {
    LatticeGeometry g{dim, cutoff, norm};
    g.validate();
    return g;
}

void LatticeGeometry::validate() const {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("dimension must be in {2,3,4,5}");
    if (!(cutoff >= 1.0) || !std::isfinite(cutoff))
        throw std::invalid_argument("cutoff M must be a finite number >= 1");
}

int LatticeGeometry::radius() const { return static_cast<int>(std::floor(cutoff + 1e-9)); }

double LatticeGeometry::norm_of(const Mode& k) const {
    return norm == NormKind::euclidean ? std::sqrt(static_cast<double>(k.norm2()))
                                       : static_cast<double>(k.sup_norm());
}

bool LatticeGeometry::contains(const Mode& k) const {
    if (k.is_zero()) return false;
    if (norm == NormKind::sup) return k.sup_norm() <= radius();
    return static_cast<double>(k.norm2()) <= cutoff * cutoff * (1.0 + 1e-12);
}

bool LatticeGeometry::interacts(const Mode& l, const Mode& m) const {
    return contains(l) && contains(m) && contains(l + m);
}

ModeLattice::ModeLattice(int dim, double cutoff) : ModeLattice(LatticeGeometry::make(dim, cutoff)) {}

ModeLattice::ModeLattice(int dim, double cutoff, NormKind norm)
    : ModeLattice(LatticeGeometry::make(dim, cutoff, norm)) {}

ModeLattice::ModeLattice(const LatticeGeometry& geometry) : geom_(geometry) {
    geom_.validate();
    lambda_ = geom_.cutoff > 1.0 ? lambda_eps(geom_.dim, geom_.cutoff)
                                 : std::numeric_limits<double>::quiet_NaN();
    radius_ = geom_.radius();
    side_ = static_cast<std::size_t>(2 * radius_ + 1);
    std::size_t volume = 1;
    for (int a = 0; a < geom_.dim; ++a) volume *= side_;
    box_.assign(volume, npos);

    // Box slots enumerate components in lexicographic order already.
    std::vector<int> c(static_cast<std::size_t>(geom_.dim), -radius_);
    for (std::size_t slot = 0; slot < volume; ++slot) {
        Mode k{std::span<const int>(c)};
        if (geom_.contains(k)) {
            box_[slot] = static_cast<std::int32_t>(modes_.size());
            modes_.push_back(k);
        }
        for (int a = geom_.dim - 1; a >= 0; --a) {
            if (++c[static_cast<std::size_t>(a)] <= radius_) break;
            c[static_cast<std::size_t>(a)] = -radius_;
        }
    }
    neg_.resize(modes_.size());
    norm2_.resize(modes_.size());
    half_.resize(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        neg_[i] = static_cast<std::size_t>(find(-modes_[i]));
        norm2_[i] = modes_[i].norm2();
        int first = 0;
        for (int a = 0; a < geom_.dim; ++a)
            if (modes_[i][a] != 0) { first = modes_[i][a]; break; }
        half_[i] = first > 0;
    }
}

double ModeLattice::lambda() const {
    if (std::isnan(lambda_)) throw std::domain_error("coupling requires cutoff M > 1");
    return lambda_;
}

std::int32_t ModeLattice::find(const Mode& k) const {
    std::size_t slot = 0;
    for (int a = 0; a < geom_.dim; ++a) {
        const int v = k[a];
        if (v < -radius_ || v > radius_) return npos;
        slot = slot * side_ + static_cast<std::size_t>(v + radius_);
    }
    for (int a = geom_.dim; a < kMaxDim; ++a)
        if (k[a] != 0) return npos;
    return box_[slot];
}

std::size_t ModeLattice::index_of(const Mode& k) const {
    const auto i = find(k);
    if (i == npos) throw std::out_of_range("mode " + k.str() + " is not in the lattice");
    return static_cast<std::size_t>(i);
}

bool ModeLattice::j_indicator(const Mode& l, const Mode& m) const {
    return contains(l) && contains(m) && contains(l + m);
}

std::int32_t ModeLattice::interacting_sum(std::size_t i, std::size_t j) const {
    return find(modes_[i] + modes_[j]);
}

std::int32_t ModeLattice::interacting_partner(const Mode& k, std::size_t i) const {
    if (!contains(k)) return npos;
    return find(k - modes_[i]);
}

LatticePtr make_lattice(int dim, double cutoff) { return std::make_shared<const ModeLattice>(dim, cutoff); }

LatticePtr make_lattice(int dim, double cutoff, NormKind norm) {
    return std::make_shared<const ModeLattice>(dim, cutoff, norm);
}

}  // namespace burgers
