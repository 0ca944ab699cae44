#include "burgers/field.hpp"

#include "burgers/csv.hpp"
#include "burgers/fft_convolver.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace burgers {

double NonlinearitySpec::w_norm2() const {
    double s = 0.0;
    for (double v : w) s += v * v;
    return s;
}

void NonlinearitySpec::validate(int dim) const {
    if (static_cast<int>(w.size()) != dim)
        throw std::invalid_argument("w must have " + std::to_string(dim) + " components");
    for (double v : w)
        if (!std::isfinite(v)) throw std::invalid_argument("w components must be finite");
    if (!std::isfinite(coupling) || coupling < 0.0)
        throw std::invalid_argument("coupling must be finite and >= 0");
}

NonlinearitySpec weak_coupling(const ModeLattice& lattice, std::vector<double> w) {
    NonlinearitySpec s{std::move(w), lattice.lambda()};
    s.validate(lattice.dim());
    return s;
}

SpectralField::SpectralField(LatticePtr lattice)
    : lattice_(std::move(lattice)), coeffs_(lattice_->size(), Complex{}) {}

SpectralField::SpectralField(LatticePtr lattice, std::vector<Complex> coeffs)
    : lattice_(std::move(lattice)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != lattice_->size()) throw std::invalid_argument("coefficient count mismatch");
}

Complex SpectralField::at(const Mode& k) const {
    const auto i = lattice_->find(k);
    return i == ModeLattice::npos ? Complex{} : coeffs_[static_cast<std::size_t>(i)];
}

void SpectralField::set(const Mode& k, Complex value) { coeffs_[lattice_->index_of(k)] = value; }

bool SpectralField::is_hermitian(double tol) const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (std::abs(coeffs_[lattice_->negated(i)] - std::conj(coeffs_[i])) > tol) return false;
    return true;
}

double SpectralField::energy() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return s;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (other.size() != size()) throw std::invalid_argument("field size mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return Rng(seq);
}

void fill_white_noise(SpectralField& field, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& lat = field.lattice();
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        if (!lat.in_half(i)) continue;
        const double a = gauss(rng);
        const double b = gauss(rng);
        field[i] = Complex(a * s, b * s);
        field[lat.negated(i)] = Complex(a * s, -b * s);
    }
}

SpectralField sample_white_noise(LatticePtr lattice, std::uint64_t seed) {
    SpectralField f(std::move(lattice));
    Rng rng = derived_rng(seed, 0);
    fill_white_noise(f, rng);
    return f;
}

namespace {

void apply_prefactor(const NonlinearitySpec& spec, const ModeLattice& lat, std::span<Complex> conv) {
    const Complex pref = kI * spec.coupling / fourier_volume_root(lat.dim());
    for (std::size_t q = 0; q < lat.size(); ++q) conv[q] *= pref * spec.w_dot(lat.mode(q));
}

}  // namespace

SpectralField nonlinearity(const SpectralField& field, const NonlinearitySpec& spec, FftConvolver& fft) {
    SpectralField out(field.lattice_ptr());
    fft.square(field.coeffs(), out.coeffs());
    apply_prefactor(spec, field.lattice(), out.coeffs());
    return out;
}

SpectralField nonlinearity(const SpectralField& field, const NonlinearitySpec& spec) {
    FftConvolver fft(field.lattice_ptr());
    return nonlinearity(field, spec, fft);
}

SpectralField nonlinearity_direct(const SpectralField& field, const NonlinearitySpec& spec) {
    const auto& lat = field.lattice();
    SpectralField out(field.lattice_ptr());
    for (std::size_t l = 0; l < lat.size(); ++l) {
        if (field[l] == Complex{}) continue;
        for (std::size_t m = 0; m < lat.size(); ++m) {
            const auto q = lat.interacting_sum(l, m);
            if (q == ModeLattice::npos) continue;
            out[static_cast<std::size_t>(q)] += field[l] * field[m];
        }
    }
    apply_prefactor(spec, lat, out.coeffs());
    return out;
}

Complex pairing(const SpectralField& field, const SpectralField& testfn) {
    const auto& lat = field.lattice();
    if (testfn.size() != field.size()) throw std::invalid_argument("pairing requires a shared lattice");
    Complex s{};
    for (std::size_t i = 0; i < lat.size(); ++i) s += field[i] * testfn[lat.negated(i)];
    return s;
}

double invariance_residual(const SpectralField& field, const NonlinearitySpec& spec) {
    return std::abs(pairing(nonlinearity(field, spec), field));
}

namespace {

constexpr char kMagic[4] = {'B', 'S', 'F', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw std::runtime_error("truncated field file");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_binary(std::ostream& os, const SpectralField& field) {
    const auto& lat = field.lattice();
    os.write(kMagic, 4);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(lat.dim()));
    put_le<std::uint32_t>(os, lat.norm_kind() == NormKind::euclidean ? 0u : 1u);
    put_le<double>(os, lat.cutoff());
    put_le<std::uint64_t>(os, lat.size());
    for (const auto& c : field.coeffs()) {
        put_le<double>(os, c.real());
        put_le<double>(os, c.imag());
    }
}

SpectralField read_binary(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a spectral field file");
    const auto dim = get_le<std::uint32_t>(is);
    const auto norm = get_le<std::uint32_t>(is);
    const auto cutoff = get_le<double>(is);
    const auto count = get_le<std::uint64_t>(is);
    auto lat = make_lattice(static_cast<int>(dim), cutoff, norm == 0 ? NormKind::euclidean : NormKind::sup);
    if (count != lat->size()) throw std::runtime_error("mode count does not match the lattice header");
    std::vector<Complex> c(count);
    for (auto& v : c) {
        const double re = get_le<double>(is);
        const double im = get_le<double>(is);
        v = Complex(re, im);
    }
    return SpectralField(std::move(lat), std::move(c));
}

void write_csv(std::ostream& os, const SpectralField& field) {
    const auto& lat = field.lattice();
    CsvWriter csv(os);
    std::vector<std::string> names;
    for (int a = 0; a < lat.dim(); ++a) names.push_back("k" + std::to_string(a + 1));
    names.push_back("re");
    names.push_back("im");
    csv.header(names);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        for (int a = 0; a < lat.dim(); ++a) csv.cell(lat.mode(i)[a]);
        csv.cell(field[i].real()).cell(field[i].imag());
        csv.end_row();
    }
}

}  // namespace burgers
