#pragma once

// Grid realization of the hbar-dependent operators on a periodic box
// [-L, L)^d with M points per axis. Fourier conventions:
//   x_j = -L + j dx,  dx = 2L/M,  xi_k = hbar * pi * k / L  (k signed, FFT order),
//   (Op(a) psi)(x_j) = M^{-d} sum_k a(x_j, xi_k) psihat_k e^{i xi_k (x_j + L) / hbar}.

#include "quantact/action.hpp"
#include "quantact/formal_symbol.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace quantact {

using cplx = std::complex<double>;

struct GridSpec {
    std::size_t dimension = 1;  // 1 or 2
    std::size_t points = 64;    // per axis, a power of two
    double half_width = 8.0;
    double hbar = 0.1;

    void validate() const;
    std::size_t size() const;
    double spacing() const { return 2.0 * half_width / static_cast<double>(points); }
    double coordinate(std::size_t j) const { return -half_width + static_cast<double>(j) * spacing(); }
    /// Wavenumber pi k / L of FFT bin j (k = j or j - M).
    double wavenumber(std::size_t j) const;
    double momentum(std::size_t j) const { return hbar * wavenumber(j); }
    /// Largest |xi| on the lattice.
    double xi_window() const { return hbar * 3.141592653589793 * static_cast<double>(points) / (2.0 * half_width); }
};

class WaveGrid {
public:
    explicit WaveGrid(GridSpec spec);
    /// Samples f on the grid; coords name the axes, constants bind the remaining symbols.
    static WaveGrid sample(const GridSpec& spec, const Expr& f, const std::vector<std::string>& coords,
                           const NumericPoint& constants = {});

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return data_.size(); }
    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }
    /// Axis coordinates of flat index i (row-major, axis 0 slowest).
    std::vector<double> point(std::size_t i) const;

    /// Discrete inner product sum conj(f) g dx^d.
    cplx inner(const WaveGrid& o) const;
    double norm() const;
    /// Largest modulus on the outermost grid lines; measures periodization error.
    double boundary_max() const;
    WaveGrid operator-(const WaveGrid& o) const;
    WaveGrid scaled(cplx c) const;
    void check_finite(const std::string& where) const;

    /// Header "wave_grid dimension=d points=M half_width=L hbar=h", then one "re im" line per sample.
    std::string dump() const;
    static WaveGrid parse_dump(const std::string& text);

private:
    GridSpec spec_;
    std::vector<cplx> data_;
};

struct NumericAmplitude {
    Expr expr;                        // in the coordinates, xi1..xid and optionally hbar
    std::vector<std::string> coords;  // names of the grid axes
    NumericPoint constants;           // values for every other symbol
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fourier multiplier / pointwise product when the amplitude separates,
/// per-x rows otherwise.
WaveGrid kn_apply(const NumericAmplitude& a, const WaveGrid& psi);

enum class PullbackPath { Identity, Permutation, Shear, Direct };
const char* to_string(PullbackPath p);

struct FioDiagnostics {
    PullbackPath path = PullbackPath::Identity;
    bool out_of_box = false;  // some phi^{-1}(x_j) left the box and was wrapped
    bool separable = true;    // the amplitude took the fast path
    double xi_window = 0.0;
};

/// w o phi^{-1} by exact index permutation, per-line Fourier shift or direct
/// trigonometric interpolation.
WaveGrid pullback(const Diffeo& phi, const WaveGrid& w, const NumericPoint& constants = {},
                  FioDiagnostics* diag = nullptr);
/// Op(a, phi) = t_phi o Op(a(phi(.), xi)).
WaveGrid fio_apply(const NumericAmplitude& a, const Diffeo& phi, const WaveGrid& psi, FioDiagnostics* diag = nullptr);

/// max |<T psi_i, T psi_j> - <psi_i, psi_j>| over the test set (pass unit-norm tests for relative values).
double unitarity_residual(const NumericAmplitude& a, const Diffeo& phi, const std::vector<WaveGrid>& tests);

/// g -> (a_g, phi_g) evaluated numerically.
struct NumericSystem {
    std::function<NumericAmplitude(const Element&)> amplitude;
    std::function<Diffeo(const Element&)> map;
};
/// System a_g from a template in the action's parameter names, phi_g from the action.
NumericSystem system_from_template(const Action& action, const Expr& amplitude, const NumericPoint& constants = {});

/// max over pairs and tests of ||T_{g1} T_{g2} psi - T_{g1 g2} psi|| / ||psi||.
double representation_residual(const Action& action, const NumericSystem& system,
                                const std::vector<std::pair<Element, Element>>& pairs,
                                const std::vector<WaveGrid>& tests);

struct StandardProductResult {
    double quadrature_error = 0.0;   // Op(a)Op(b)psi vs Op(c_quad)psi, c_quad by oscillatory quadrature
    double closed_form_error = 0.0;  // Op(a)Op(b)psi vs Op(a*b)psi, a*b from the symbol calculus
};
/// 1d only, M <= 128; a and b polynomial in xi for the closed form.
StandardProductResult standard_product_residual(const NumericAmplitude& a, const NumericAmplitude& b,
                                                const WaveGrid& psi);

/// Amplitude of the symbol sum_n hbar^n f_{n,a} xi^a: sum hbar^{n-|a|} f_{n,a} xi^a.
Expr amplitude_of_symbol(const FormalSymbol& p);

struct AsymptoticResult {
    std::vector<double> hbars;
    std::vector<double> errors;  // L2 error over ||psi||
    bool exact = false;          // every error at round-off level; slope degenerate
    bool fit_ok = false;
    double slope = 0.0;
    double spread = 0.0;  // max |residual| of the log-log fit
    std::string str() const;
};

/// Compares fio_apply of a = sum_k hbar^k a^k with the truncation at order N of
/// its formal symbol, Op(P, phi) = sum_{n<=N} hbar^n f_{n,a}(x) (D^a psi)(phi^{-1} x).
AsymptoticResult asymptotic_consistency(const std::vector<Expr>& amplitude, const Diffeo& phi, const Expr& psi,
                                        const GridSpec& grid, const std::vector<double>& hbars, int truncation,
                                        TaylorConvention convention = TaylorConvention::MultiFactorial,
                                        const NumericPoint& constants = {});

/// Gaussian exp(-|x-c|^2 / (2 s^2) + i <k, x>) normalized to unit discrete norm.
WaveGrid gaussian(const GridSpec& spec, const std::vector<double>& center, double width,
                  const std::vector<double>& wavevector = {});

}  // namespace quantact
