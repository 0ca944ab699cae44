#include "burgers/fft_convolver.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace burgers {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

int smooth_size(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

struct FftConvolver::Impl {
    LatticePtr lattice;
    int L = 0;
    std::size_t real_size = 0;
    std::size_t complex_size = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan to_real = nullptr;
    fftw_plan to_spec = nullptr;
    // Slot in the half-spectrum holding k (or -k when conj_[i] is set).
    std::vector<std::size_t> slot;
    std::vector<std::uint8_t> conj;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (to_real) fftw_destroy_plan(to_real);
        if (to_spec) fftw_destroy_plan(to_spec);
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
    }
};

FftConvolver::FftConvolver(LatticePtr lattice) : impl_(std::make_unique<Impl>()) {
    auto& s = *impl_;
    s.lattice = std::move(lattice);
    const int d = s.lattice->dim();
    const int R = s.lattice->radius();
    s.L = smooth_size(2 * (2 * R + 1));
    const int half = s.L / 2 + 1;
    s.real_size = 1;
    s.complex_size = 1;
    for (int a = 0; a < d; ++a) {
        s.real_size *= static_cast<std::size_t>(s.L);
        s.complex_size *= static_cast<std::size_t>(a == d - 1 ? half : s.L);
    }
    s.real = fftw_alloc_real(s.real_size);
    s.spec = fftw_alloc_complex(s.complex_size);
    if (!s.real || !s.spec) throw std::bad_alloc();

    std::vector<int> n(static_cast<std::size_t>(d), s.L);
    {
        std::lock_guard lock(planner_mutex());
        s.to_real = fftw_plan_dft_c2r(d, n.data(), s.spec, s.real, FFTW_ESTIMATE);
        s.to_spec = fftw_plan_dft_r2c(d, n.data(), s.real, s.spec, FFTW_ESTIMATE);
    }
    if (!s.to_real || !s.to_spec) throw std::runtime_error("FFTW planning failed");

    const auto& lat = *s.lattice;
    s.slot.resize(lat.size());
    s.conj.resize(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
        Mode k = lat.mode(i);
        const bool flip = k[d - 1] < 0;
        if (flip) k = -k;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            const int extent = a == d - 1 ? half : s.L;
            const int v = ((k[a] % s.L) + s.L) % s.L;
            idx = idx * static_cast<std::size_t>(extent) + static_cast<std::size_t>(v);
        }
        s.slot[i] = idx;
        s.conj[i] = flip;
    }
}

FftConvolver::~FftConvolver() = default;
FftConvolver::FftConvolver(FftConvolver&&) noexcept = default;
FftConvolver& FftConvolver::operator=(FftConvolver&&) noexcept = default;

int FftConvolver::grid_size() const { return impl_->L; }
const ModeLattice& FftConvolver::lattice() const { return *impl_->lattice; }

void FftConvolver::square(std::span<const Complex> in, std::span<Complex> out) {
    auto& s = *impl_;
    const std::size_t n = s.lattice->size();
    if (in.size() != n || out.size() != n) throw std::invalid_argument("convolver size mismatch");
    std::memset(s.spec, 0, sizeof(fftw_complex) * s.complex_size);
    for (std::size_t i = 0; i < n; ++i) {
        if (s.conj[i]) continue;
        s.spec[s.slot[i]][0] = in[i].real();
        s.spec[s.slot[i]][1] = in[i].imag();
    }
    fftw_execute(s.to_real);
    for (std::size_t x = 0; x < s.real_size; ++x) s.real[x] *= s.real[x];
    fftw_execute(s.to_spec);
    const double norm = 1.0 / static_cast<double>(s.real_size);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = s.spec[s.slot[i]];
        out[i] = s.conj[i] ? Complex(c[0], -c[1]) * norm : Complex(c[0], c[1]) * norm;
    }
}

}  // namespace burgers
