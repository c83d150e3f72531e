#pragma once

// Uniform periodic grid on [-L, L) with an FFTW-backed transform pair,
// spectral differentiation by Fourier multipliers, quadrature and norms.
//
// Transform convention: coefficient(xi_k) = dx * sum_j f(x_j) exp(-i xi_k x_j),
// so the xi = 0 coefficient approximates the integral of f over the line.
// Public coefficient arrays are ordered like wavenumbers(), i.e. ascending
// k = -N/2, ..., N/2-1. Internally the raw FFT order (0, 1, ..., -1) is used.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "solitonlab/error.hpp"

namespace solitonlab {

using cplx = std::complex<double>;

namespace detail {

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is. Every plan creation and destruction goes through this mutex.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_complex* buf = fftw_alloc_complex(n);
        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, flags);
        fftw_free(buf);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    // Unnormalized in-place transforms: forward computes sum f_j e^{-2 pi i kj/N}.
    void forward(std::span<cplx> data) const { execute(forward_, data); }
    void backward(std::span<cplx> data) const { execute(backward_, data); }

private:
    void execute(fftw_plan plan, std::span<cplx> data) const {
        if (data.size() != n_) throw ShapeError("FFT length mismatch");
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, p, p);
    }

    std::size_t n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace detail

// Linear dispersion symbol quartic*xi^4 + quadratic*xi^2. The mixed model
// (1, 1) is the one studied throughout; (1, 0) is the pure fourth-order
// equation and (0, 1) the classical second-order NLS.
struct Dispersion {
    double quartic = 1.0;
    double quadratic = 1.0;

    static constexpr Dispersion mixed() { return {1.0, 1.0}; }
    static constexpr Dispersion pure_quartic() { return {1.0, 0.0}; }
    static constexpr Dispersion second_order() { return {0.0, 1.0}; }
    static constexpr Dispersion with_beta(double beta) { return {1.0, beta}; }

    double operator()(double xi) const {
        const double xi2 = xi * xi;
        return quartic * xi2 * xi2 + quadratic * xi2;
    }
};

class SpectralGrid {
public:
    static constexpr double default_half_width = 200.0;
    static constexpr std::size_t default_points = 8192;

    static std::shared_ptr<const SpectralGrid> make(double half_width = default_half_width,
                                                    std::size_t n_points = default_points) {
        return std::shared_ptr<const SpectralGrid>(new SpectralGrid(half_width, n_points));
    }

    std::size_t size() const noexcept { return n_; }
    double half_width() const noexcept { return half_width_; }
    double length() const noexcept { return 2.0 * half_width_; }
    double dx() const noexcept { return dx_; }

    std::span<const double> nodes() const noexcept { return nodes_; }
    // Ascending order, k = -N/2 .. N/2-1.
    std::span<const double> wavenumbers() const noexcept { return wavenumbers_; }
    // Raw FFT order, k = 0 .. N/2-1, -N/2 .. -1.
    std::span<const double> fft_wavenumbers() const noexcept { return fft_wavenumbers_; }

    // Index of the node x = 0.
    std::size_t center_index() const noexcept { return n_ / 2; }

    void fft_forward(std::span<cplx> data) const { plan_->forward(data); }
    void fft_backward(std::span<cplx> data) const { plan_->backward(data); }

    // Symbol evaluated on the raw FFT ordering, ready for multiply-in-place.
    template <class Symbol>
    std::vector<double> fft_symbol(Symbol&& symbol) const {
        std::vector<double> s(n_);
        for (std::size_t k = 0; k < n_; ++k) s[k] = symbol(fft_wavenumbers_[k]);
        return s;
    }

    // Position in the ascending ordering of raw FFT slot k, and back.
    std::size_t sorted_index(std::size_t fft_slot) const noexcept { return (fft_slot + n_ / 2) % n_; }
    std::size_t fft_slot(std::size_t sorted) const noexcept { return (sorted + n_ / 2) % n_; }

    void check_length(std::size_t len, const char* what) const {
        if (len != n_) {
            throw ShapeError(std::string(what) + ": length " + std::to_string(len) +
                             " does not match grid size " + std::to_string(n_));
        }
    }

private:
    SpectralGrid(double half_width, std::size_t n_points) : n_(n_points), half_width_(half_width) {
        if (!(half_width > 0.0) || !std::isfinite(half_width)) {
            throw ParameterError("grid half width must be positive and finite");
        }
        if (n_points < 4 || (n_points & (n_points - 1)) != 0) {
            throw ParameterError("grid size must be a power of two >= 4");
        }
        dx_ = 2.0 * half_width / static_cast<double>(n_);
        const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
        nodes_.resize(n_);
        wavenumbers_.resize(n_);
        fft_wavenumbers_.resize(n_);
        const double dk = M_PI / half_width;
        for (std::size_t j = 0; j < n_; ++j) {
            const auto shifted = static_cast<std::ptrdiff_t>(j) - half;
            // (j - N/2) * dx keeps x_{N-j} = -x_j exact in floating point.
            nodes_[j] = static_cast<double>(shifted) * dx_;
            wavenumbers_[j] = static_cast<double>(shifted) * dk;
            const auto k = static_cast<std::ptrdiff_t>(j) < half ? static_cast<std::ptrdiff_t>(j)
                                                                 : shifted - half;
            fft_wavenumbers_[j] = static_cast<double>(k) * dk;
        }
        plan_ = std::make_shared<detail::FftPlan>(n_);
    }

    std::size_t n_;
    double half_width_;
    double dx_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> wavenumbers_;
    std::vector<double> fft_wavenumbers_;
    std::shared_ptr<detail::FftPlan> plan_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

// Samples of a real profile phi at the grid nodes.
struct RealProfile {
    GridPtr grid;
    std::vector<double> values;

    RealProfile() = default;
    RealProfile(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        validate();
    }
    explicit RealProfile(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    void validate() const {
        if (!grid) throw ShapeError("profile has no grid");
        grid->check_length(values.size(), "RealProfile");
        for (double v : values) {
            if (!std::isfinite(v)) throw DomainError("RealProfile contains a non-finite value");
        }
    }
};

// Samples of a complex field u = u1 + i u2.
struct ComplexField {
    GridPtr grid;
    std::vector<cplx> values;

    ComplexField() = default;
    ComplexField(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
        validate();
    }
    explicit ComplexField(GridPtr g) : grid(std::move(g)), values(grid->size(), cplx{}) {}
    explicit ComplexField(const RealProfile& p) : grid(p.grid), values(p.values.begin(), p.values.end()) {}

    std::size_t size() const noexcept { return values.size(); }

    void validate() const {
        if (!grid) throw ShapeError("field has no grid");
        grid->check_length(values.size(), "ComplexField");
        for (const cplx& v : values) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw DomainError("ComplexField contains a non-finite value");
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Transforms

inline std::vector<cplx> forward_transform(const ComplexField& field) {
    const SpectralGrid& g = *field.grid;
    g.check_length(field.values.size(), "forward_transform");
    std::vector<cplx> work = field.values;
    g.fft_forward(work);
    std::vector<cplx> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        // exp(-i xi_k x_j) = (-1)^k exp(-2 pi i k j / N) because x_j = (j - N/2) dx.
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out[g.sorted_index(k)] = sign * g.dx() * work[k];
    }
    return out;
}

inline std::vector<cplx> forward_transform(const RealProfile& profile) {
    return forward_transform(ComplexField(profile));
}

inline ComplexField inverse_transform(const GridPtr& grid, std::span<const cplx> coefficients) {
    const SpectralGrid& g = *grid;
    g.check_length(coefficients.size(), "inverse_transform");
    std::vector<cplx> work(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        work[k] = sign * coefficients[g.sorted_index(k)] / g.dx();
    }
    g.fft_backward(work);
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (auto& v : work) v *= inv_n;
    ComplexField out;
    out.grid = grid;
    out.values = std::move(work);
    return out;
}

namespace detail {

// out = IFFT(symbol * FFT(in)) using a symbol tabulated in raw FFT order.
inline void apply_fft_symbol(const SpectralGrid& g, std::span<const cplx> in, std::span<const double> symbol,
                             std::span<cplx> out) {
    std::copy(in.begin(), in.end(), out.begin());
    g.fft_forward(out);
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) out[k] *= symbol[k] * inv_n;
    g.fft_backward(out);
}

inline std::vector<double> apply_fft_symbol_real(const SpectralGrid& g, std::span<const double> in,
                                                 std::span<const double> symbol) {
    std::vector<cplx> work(in.begin(), in.end());
    apply_fft_symbol(g, work, symbol, work);
    std::vector<double> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) out[j] = work[j].real();
    return out;
}

}  // namespace detail

// Fourier multiplier: inverse transform of symbol(xi) * coefficients.
template <class Symbol>
ComplexField apply_symbol(const ComplexField& field, Symbol&& symbol) {
    const SpectralGrid& g = *field.grid;
    g.check_length(field.values.size(), "apply_symbol");
    std::vector<cplx> work = field.values;
    g.fft_forward(work);
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const cplx s = symbol(g.fft_wavenumbers()[k]);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw DomainError("apply_symbol: symbol is not finite on the grid");
        }
        work[k] *= s * inv_n;
    }
    g.fft_backward(work);
    ComplexField out;
    out.grid = field.grid;
    out.values = std::move(work);
    return out;
}

// Real-valued version; the symbol is expected to be real and even so that the
// result is real. The imaginary rounding residue is dropped.
template <class Symbol>
RealProfile apply_symbol(const RealProfile& profile, Symbol&& symbol) {
    ComplexField out = apply_symbol(ComplexField(profile), std::forward<Symbol>(symbol));
    RealProfile r(profile.grid);
    for (std::size_t j = 0; j < r.size(); ++j) r.values[j] = out.values[j].real();
    return r;
}

// Spectral derivative of order `order` (symbol (i xi)^order).
inline RealProfile derivative(const RealProfile& profile, int order) {
    ComplexField c = apply_symbol(ComplexField(profile), [order](double xi) { return std::pow(cplx(0.0, xi), order); });
    RealProfile r(profile.grid);
    for (std::size_t j = 0; j < r.size(); ++j) r.values[j] = c.values[j].real();
    return r;
}

// ---------------------------------------------------------------------------
// Quadrature and norms

// Trapezoid rule on a periodic uniform grid, i.e. dx * sum(values).
inline double quadrature(const SpectralGrid& grid, std::span<const double> values) {
    grid.check_length(values.size(), "quadrature");
    double s = 0.0;
    for (double v : values) s += v;
    return grid.dx() * s;
}

inline double quadrature(const RealProfile& profile) { return quadrature(*profile.grid, profile.values); }

enum class NormKind { L2, Linf, Lp, H2 };

// Weight (1 + xi^2 + xi^4) defining the H^2 norm used everywhere.
inline double h2_weight(double xi) {
    const double xi2 = xi * xi;
    return 1.0 + xi2 + xi2 * xi2;
}

// Spectral sum (1/2L) sum_k weight(xi_k) |c_k|^2 over continuum-normalized
// coefficients, i.e. the Parseval form of a weighted L2 integral.
template <class Weight>
double spectral_energy(const SpectralGrid& g, std::span<const cplx> raw_fft, Weight&& weight) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += weight(g.fft_wavenumbers()[k]) * std::norm(raw_fft[k]);
    // |dx * F_k|^2 / (2L) = dx / N * |F_k|^2.
    return s * g.dx() / static_cast<double>(g.size());
}

inline double norm(const ComplexField& field, NormKind kind, double p = 2.0) {
    const SpectralGrid& g = *field.grid;
    g.check_length(field.values.size(), "norm");
    switch (kind) {
        case NormKind::L2: {
            double s = 0.0;
            for (const cplx& v : field.values) s += std::norm(v);
            return std::sqrt(g.dx() * s);
        }
        case NormKind::Linf: {
            double m = 0.0;
            for (const cplx& v : field.values) m = std::max(m, std::abs(v));
            return m;
        }
        case NormKind::Lp: {
            if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("Lp norm requires finite p >= 1");
            double s = 0.0;
            for (const cplx& v : field.values) s += std::pow(std::abs(v), p);
            return std::pow(g.dx() * s, 1.0 / p);
        }
        case NormKind::H2: {
            std::vector<cplx> work = field.values;
            g.fft_forward(work);
            return std::sqrt(spectral_energy(g, work, h2_weight));
        }
    }
    throw ParameterError("unknown norm kind");
}

inline double norm(const RealProfile& profile, NormKind kind, double p = 2.0) {
    if (kind == NormKind::Linf) {
        double m = 0.0;
        for (double v : profile.values) m = std::max(m, std::abs(v));
        return m;
    }
    return norm(ComplexField(profile), kind, p);
}

// L2 inner product of real profiles by quadrature.
inline double inner(const RealProfile& a, const RealProfile& b) {
    a.grid->check_length(b.values.size(), "inner");
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a.values[j] * b.values[j];
    return a.grid->dx() * s;
}

// Circular shift by whole cells: out(x_j) = in(x_{j - cells}).
template <class T>
std::vector<T> shift_cells(std::span<const T> in, std::ptrdiff_t cells) {
    const auto n = static_cast<std::ptrdiff_t>(in.size());
    std::vector<T> out(in.size());
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const std::ptrdiff_t src = ((j - cells) % n + n) % n;
        out[static_cast<std::size_t>(j)] = in[static_cast<std::size_t>(src)];
    }
    return out;
}

}  // namespace solitonlab
