#include "quantact/numfio.hpp"

#include "quantact/opcalc.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>

namespace quantact {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

/// In-place d-dimensional DFT, unnormalized; sign -1 forward, +1 backward.
void fft(std::vector<cplx>& data, const GridSpec& spec, int sign) {
    std::vector<int> dims(spec.dimension, static_cast<int>(spec.points));
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
}

/// One-dimensional transform of length n applied to a strided line.
class LineFft {
public:
    LineFft(std::size_t n, int sign) : buf_(n) {
        auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE);
    }
    ~LineFft() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan_);
    }
    LineFft(const LineFft&) = delete;
    LineFft& operator=(const LineFft&) = delete;

    std::vector<cplx>& buffer() { return buf_; }
    void run() { fftw_execute(plan_); }

private:
    std::vector<cplx> buf_;
    fftw_plan plan_;
};

NumericPoint with_defaults(NumericPoint c, double hbar) {
    c.try_emplace("hbar", hbar);
    c.try_emplace("pi", kPi);
    return c;
}

/// Evaluator for an expression in (coords, xi1..xid) plus bound constants.
class PhaseSpaceFn {
public:
    PhaseSpaceFn(const Expr& e, const std::vector<std::string>& coords, const NumericPoint& constants)
        : d_(coords.size()) {
        std::vector<std::string> vars = coords;
        for (const auto& xi : momentum_names(d_)) {
            vars.push_back(xi);
        }
        values_.assign(vars.size(), 0.0);
        for (const auto& [name, v] : constants) {
            if (std::find(vars.begin(), vars.end(), name) == vars.end()) {
                vars.push_back(name);
                values_.push_back(v);
            }
        }
        fn_.emplace(e, vars);
    }
    cplx operator()(const double* x, const double* xi) {
        for (std::size_t k = 0; k < d_; ++k) {
            values_[k] = x[k];
            values_[d_ + k] = xi ? xi[k] : 0.0;
        }
        return (*fn_)(values_.data());
    }

private:
    std::size_t d_;
    std::vector<cplx> values_;
    std::optional<CompiledExpr> fn_;
};

/// Multi-index of flat index i, axis 0 slowest.
std::vector<std::size_t> unflatten(std::size_t i, const GridSpec& spec) {
    std::vector<std::size_t> idx(spec.dimension);
    for (std::size_t a = spec.dimension; a-- > 0;) {
        idx[a] = i % spec.points;
        i /= spec.points;
    }
    return idx;
}

std::vector<double> momenta(std::size_t i, const GridSpec& spec) {
    const auto idx = unflatten(i, spec);
    std::vector<double> xi(spec.dimension);
    for (std::size_t a = 0; a < spec.dimension; ++a) {
        xi[a] = spec.momentum(idx[a]);
    }
    return xi;
}

bool mentions(const Expr& e, const std::vector<std::string>& names) {
    const auto fs = e.free_symbols();
    return std::any_of(names.begin(), names.end(), [&](const std::string& n) { return fs.count(n) > 0; });
}

Expr single(const Monomial& m, const Gauss& c) { return Expr::from_terms({Term{m, c}}); }

/// Splits a into sum_t X_t(x) Xi_t(xi), grouped by the xi factor; nullopt when
/// some term couples x and xi.
std::optional<std::map<Expr, Expr>> separate(const Expr& a, const std::vector<std::string>& xi) {
    std::map<Expr, Expr> out;
    for (const auto& t : a.terms()) {
        Expr xpart = Expr(t.coeff);
        Expr kpart = Expr(1);
        for (const auto& [s, k] : t.mono.powers) {
            const Expr f = Expr::symbol(s.name()).pow(k);
            if (std::find(xi.begin(), xi.end(), s.name()) != xi.end()) {
                kpart *= f;
            } else {
                xpart *= f;
            }
        }
        if (t.mono.exponent) {
            Expr ex;
            Expr ek;
            for (const auto& et : Expr::from_rep(t.mono.exponent).terms()) {
                const Expr piece = single(et.mono, et.coeff);
                if (!mentions(piece, xi)) {
                    ex += piece;
                    continue;
                }
                bool pure = true;
                for (const auto& name : piece.free_symbols()) {
                    pure = pure && std::find(xi.begin(), xi.end(), name) != xi.end();
                }
                if (!pure) {
                    return std::nullopt;
                }
                ek += piece;
            }
            xpart *= exp(ex);
            kpart *= exp(ek);
        }
        for (const auto& [atom, k] : t.mono.atoms) {
            Monomial m;
            m.atoms.emplace_back(atom, k);
            const Expr f = single(m, Gauss(1));
            const auto fs = f.free_symbols();
            const bool has_xi = mentions(f, xi);
            const bool has_other = std::any_of(fs.begin(), fs.end(), [&](const std::string& n) {
                return std::find(xi.begin(), xi.end(), n) == xi.end();
            });
            if (has_xi && has_other) {
                return std::nullopt;
            }
            (has_xi ? kpart : xpart) *= f;
        }
        out[kpart] += xpart;
    }
    return out;
}

std::vector<cplx> sample_x(const Expr& f, const GridSpec& spec, const std::vector<std::string>& coords,
                           const NumericPoint& constants) {
    PhaseSpaceFn fn(f, coords, constants);
    std::vector<cplx> out(spec.size());
    std::vector<double> x(spec.dimension);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto idx = unflatten(i, spec);
        for (std::size_t a = 0; a < spec.dimension; ++a) {
            x[a] = spec.coordinate(idx[a]);
        }
        out[i] = fn(x.data(), nullptr);
    }
    return out;
}

/// Table of exp(2 pi i n / M), n = 0..M-1.
std::vector<cplx> roots(std::size_t m) {
    std::vector<cplx> w(m);
    for (std::size_t n = 0; n < m; ++n) {
        w[n] = std::polar(1.0, 2.0 * kPi * static_cast<double>(n) / static_cast<double>(m));
    }
    return w;
}

/// Signed bin index of FFT slot j.
long signed_bin(std::size_t j, std::size_t m) {
    return j < m / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(m);
}

WaveGrid direct_rows(const NumericAmplitude& a, const WaveGrid& psi) {
    const GridSpec& spec = psi.spec();
    const std::size_t m = spec.points;
    const std::size_t n = spec.size();
    std::vector<cplx> hat = psi.data();
    fft(hat, spec, FFTW_FORWARD);
    const auto w = roots(m);
    PhaseSpaceFn fn(a.expr, a.coords, with_defaults(a.constants, spec.hbar));
    WaveGrid out(spec);
    std::vector<double> x(spec.dimension);
    std::vector<std::vector<double>> xis(n);
    for (std::size_t k = 0; k < n; ++k) {
        xis[k] = momenta(k, spec);
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ij = unflatten(i, spec);
        for (std::size_t ax = 0; ax < spec.dimension; ++ax) {
            x[ax] = spec.coordinate(ij[ax]);
        }
        cplx sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (hat[k] == 0.0) {
                continue;
            }
            const auto ik = unflatten(k, spec);
            std::size_t phase = 0;
            for (std::size_t ax = 0; ax < spec.dimension; ++ax) {
                phase += ij[ax] * ik[ax];
            }
            sum += fn(x.data(), xis[k].data()) * hat[k] * w[phase % m];
        }
        out[i] = sum * scale;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

void GridSpec::validate() const {
    if (dimension != 1 && dimension != 2) {
        throw NumericError("grid dimension must be 1 or 2");
    }
    if (points < 2 || (points & (points - 1)) != 0) {
        throw NumericError("points per axis must be a power of two, got " + std::to_string(points));
    }
    if (!(half_width > 0.0) || !(hbar > 0.0)) {
        throw NumericError("half_width and hbar must be positive");
    }
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (std::size_t a = 0; a < dimension; ++a) {
        n *= points;
    }
    return n;
}

double GridSpec::wavenumber(std::size_t j) const {
    return kPi * static_cast<double>(signed_bin(j, points)) / half_width;
}

WaveGrid::WaveGrid(GridSpec spec) : spec_(spec) {
    spec_.validate();
    data_.assign(spec_.size(), 0.0);
}

WaveGrid WaveGrid::sample(const GridSpec& spec, const Expr& f, const std::vector<std::string>& coords,
                          const NumericPoint& constants) {
    if (coords.size() != spec.dimension) {
        throw DimensionMismatch("grid has dimension " + std::to_string(spec.dimension) + " but " +
                                std::to_string(coords.size()) + " coordinates were given");
    }
    WaveGrid g(spec);
    g.data_ = sample_x(f, spec, coords, with_defaults(constants, spec.hbar));
    g.check_finite("sample");
    return g;
}

std::vector<double> WaveGrid::point(std::size_t i) const {
    const auto idx = unflatten(i, spec_);
    std::vector<double> x(spec_.dimension);
    for (std::size_t a = 0; a < spec_.dimension; ++a) {
        x[a] = spec_.coordinate(idx[a]);
    }
    return x;
}

cplx WaveGrid::inner(const WaveGrid& o) const {
    if (o.size() != size()) {
        throw NumericError("inner product of grids of different sizes");
    }
    cplx s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        s += std::conj(data_[i]) * o.data_[i];
    }
    return s * std::pow(spec_.spacing(), static_cast<double>(spec_.dimension));
}

double WaveGrid::norm() const { return std::sqrt(std::max(0.0, inner(*this).real())); }

double WaveGrid::boundary_max() const {
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const auto idx = unflatten(i, spec_);
        const bool edge = std::any_of(idx.begin(), idx.end(), [&](std::size_t j) { return j == 0; });
        if (edge) {
            m = std::max(m, std::abs(data_[i]));
        }
    }
    return m;
}

WaveGrid WaveGrid::operator-(const WaveGrid& o) const {
    if (o.size() != size()) {
        throw NumericError("difference of grids of different sizes");
    }
    WaveGrid r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        r.data_[i] -= o.data_[i];
    }
    return r;
}

WaveGrid WaveGrid::scaled(cplx c) const {
    WaveGrid r = *this;
    for (auto& v : r.data_) {
        v *= c;
    }
    return r;
}

void WaveGrid::check_finite(const std::string& where) const {
    for (const auto& v : data_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw NumericError(where + ": non-finite grid value");
        }
    }
}

std::string WaveGrid::dump() const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "wave_grid dimension=" << spec_.dimension << " points=" << spec_.points
        << " half_width=" << spec_.half_width << " hbar=" << spec_.hbar << "\n";
    for (const auto& v : data_) {
        out << v.real() << " " << v.imag() << "\n";
    }
    return out.str();
}

WaveGrid WaveGrid::parse_dump(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    GridSpec spec;
    if (std::sscanf(header.c_str(), "wave_grid dimension=%zu points=%zu half_width=%lf hbar=%lf", &spec.dimension,
                    &spec.points, &spec.half_width, &spec.hbar) != 4) {
        throw NumericError("grid dump line 1: expected 'wave_grid dimension=<d> points=<M> half_width=<L> hbar=<h>'");
    }
    WaveGrid g(spec);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double re = 0.0;
        double im = 0.0;
        if (!(in >> re >> im)) {
            throw NumericError("grid dump line " + std::to_string(i + 2) + ": expected '<re> <im>'");
        }
        g.data_[i] = {re, im};
    }
    return g;
}

// ---------------------------------------------------------------------------
// Operators

WaveGrid kn_apply(const NumericAmplitude& a, const WaveGrid& psi) {
    const GridSpec& spec = psi.spec();
    if (a.coords.size() != spec.dimension) {
        throw DimensionMismatch("amplitude coordinates do not match the grid dimension");
    }
    const auto xi = momentum_names(spec.dimension);
    const auto parts = separate(a.expr, xi);
    if (!parts) {
        WaveGrid out = direct_rows(a, psi);
        out.check_finite("kn_apply");
        return out;
    }
    const NumericPoint consts = with_defaults(a.constants, spec.hbar);
    std::vector<cplx> hat;
    WaveGrid out(spec);
    const double scale = 1.0 / static_cast<double>(spec.size());
    for (const auto& [kpart, xpart] : *parts) {
        std::vector<cplx> w;
        if (kpart == Expr(1)) {
            w = psi.data();
        } else {
            if (hat.empty()) {
                hat = psi.data();
                fft(hat, spec, FFTW_FORWARD);
            }
            PhaseSpaceFn mult(kpart, a.coords, consts);
            w.resize(spec.size());
            std::vector<double> zero(spec.dimension, 0.0);
            for (std::size_t k = 0; k < w.size(); ++k) {
                const auto m = momenta(k, spec);
                w[k] = mult(zero.data(), m.data()) * hat[k] * scale;
            }
            fft(w, spec, FFTW_BACKWARD);
        }
        if (xpart == Expr(1)) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                out[i] += w[i];
            }
        } else {
            const auto f = sample_x(xpart, spec, a.coords, consts);
            for (std::size_t i = 0; i < w.size(); ++i) {
                out[i] += f[i] * w[i];
            }
        }
    }
    out.check_finite("kn_apply");
    return out;
}

const char* to_string(PullbackPath p) {
    switch (p) {
    case PullbackPath::Identity:
        return "identity";
    case PullbackPath::Permutation:
        return "permutation";
    case PullbackPath::Shear:
        return "shear";
    case PullbackPath::Direct:
        return "direct";
    }
    return "?";
}

WaveGrid pullback(const Diffeo& phi, const WaveGrid& w, const NumericPoint& constants, FioDiagnostics* diag) {
    const GridSpec& spec = w.spec();
    const std::size_t d = spec.dimension;
    const std::size_t m = spec.points;
    if (phi.dimension() != d) {
        throw DimensionMismatch("map dimension does not match the grid");
    }
    FioDiagnostics local;
    FioDiagnostics& dg = diag ? *diag : local;
    dg.xi_window = spec.xi_window();
    const auto& coords = phi.coordinates();

    bool identity = true;
    for (std::size_t a = 0; a < d; ++a) {
        identity = identity && phi.inverse()[a] == Expr::symbol(coords[a]);
    }
    if (identity) {
        dg.path = PullbackPath::Identity;
        return w;
    }

    // phi^{-1} at every grid point
    const NumericPoint consts = with_defaults(constants, spec.hbar);
    std::vector<std::vector<double>> ys(w.size(), std::vector<double>(d));
    for (std::size_t a = 0; a < d; ++a) {
        const auto comp = sample_x(phi.inverse()[a], spec, coords, consts);
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (std::abs(comp[i].imag()) > 1e-12 * (1.0 + std::abs(comp[i].real()))) {
                throw NumericError("inverse map is not real on the grid");
            }
            ys[i][a] = comp[i].real();
        }
    }
    const double L = spec.half_width;
    const double tol = 1e-9 * L;
    for (const auto& y : ys) {
        for (double v : y) {
            if (v < -L - tol || v > L + tol) {
                dg.out_of_box = true;
            }
        }
    }

    // Grid-aligned: every phi^{-1}(x_j) is a grid point modulo the period.
    {
        bool aligned = true;
        std::vector<std::size_t> target(w.size());
        for (std::size_t i = 0; i < w.size() && aligned; ++i) {
            std::size_t flat = 0;
            for (std::size_t a = 0; a < d; ++a) {
                const double u = (ys[i][a] + L) / spec.spacing();
                const double r = std::round(u);
                if (std::abs(u - r) > 1e-9) {
                    aligned = false;
                    break;
                }
                const long mm = static_cast<long>(m);
                const long idx = ((static_cast<long>(r) % mm) + mm) % mm;
                flat = flat * m + static_cast<std::size_t>(idx);
            }
            target[i] = flat;
        }
        if (aligned) {
            dg.path = PullbackPath::Permutation;
            WaveGrid out(spec);
            for (std::size_t i = 0; i < w.size(); ++i) {
                out[i] = w[target[i]];
            }
            return out;
        }
    }

    // Shear along one axis: the other components are identities and the
    // shift along the axis does not depend on that axis.
    for (std::size_t axis = 0; axis < d; ++axis) {
        bool shear = true;
        for (std::size_t a = 0; a < d; ++a) {
            if (a != axis && phi.inverse()[a] != Expr::symbol(coords[a])) {
                shear = false;
            }
        }
        if (!shear || (phi.inverse()[axis] - Expr::symbol(coords[axis])).depends_on(coords[axis])) {
            continue;
        }
        dg.path = PullbackPath::Shear;
        const std::size_t stride = axis + 1 == d ? 1 : m;  // d <= 2
        const std::size_t lines = w.size() / m;
        LineFft fwd(m, FFTW_FORWARD);
        LineFft bwd(m, FFTW_BACKWARD);
        WaveGrid out(spec);
        for (std::size_t line = 0; line < lines; ++line) {
            const std::size_t base = stride == 1 ? line * m : line;
            const std::size_t first = base;
            const double shift = ys[first][axis] - spec.coordinate(0);
            for (std::size_t j = 0; j < m; ++j) {
                fwd.buffer()[j] = w[base + j * stride];
            }
            fwd.run();
            for (std::size_t k = 0; k < m; ++k) {
                bwd.buffer()[k] = fwd.buffer()[k] * std::polar(1.0 / static_cast<double>(m), spec.wavenumber(k) * shift);
            }
            bwd.run();
            for (std::size_t j = 0; j < m; ++j) {
                out[base + j * stride] = bwd.buffer()[j];
            }
        }
        return out;
    }

    // Direct trigonometric interpolation.
    dg.path = PullbackPath::Direct;
    std::vector<cplx> hat = w.data();
    fft(hat, spec, FFTW_FORWARD);
    const double scale = 1.0 / static_cast<double>(w.size());
    WaveGrid out(spec);
    std::vector<std::vector<cplx>> e(d, std::vector<cplx>(m));
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t k = 0; k < m; ++k) {
                e[a][k] = std::polar(1.0, spec.wavenumber(k) * (ys[i][a] + L));
            }
        }
        cplx sum = 0.0;
        if (d == 1) {
            for (std::size_t k = 0; k < m; ++k) {
                sum += hat[k] * e[0][k];
            }
        } else {
            for (std::size_t k0 = 0; k0 < m; ++k0) {
                cplx row = 0.0;
                for (std::size_t k1 = 0; k1 < m; ++k1) {
                    row += hat[k0 * m + k1] * e[1][k1];
                }
                sum += row * e[0][k0];
            }
        }
        out[i] = sum * scale;
    }
    return out;
}

WaveGrid fio_apply(const NumericAmplitude& a, const Diffeo& phi, const WaveGrid& psi, FioDiagnostics* diag) {
    NumericAmplitude moved = a;
    moved.expr = phi.precompose(a.expr);
    const auto xi = momentum_names(psi.spec().dimension);
    if (diag) {
        diag->separable = separate(moved.expr, xi).has_value();
    }
    WaveGrid out = pullback(phi, kn_apply(moved, psi), a.constants, diag);
    out.check_finite("fio_apply");
    return out;
}

double unitarity_residual(const NumericAmplitude& a, const Diffeo& phi, const std::vector<WaveGrid>& tests) {
    std::vector<WaveGrid> images;
    for (const auto& t : tests) {
        images.push_back(fio_apply(a, phi, t));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        for (std::size_t j = i; j < tests.size(); ++j) {
            worst = std::max(worst, std::abs(images[i].inner(images[j]) - tests[i].inner(tests[j])));
        }
    }
    return worst;
}

NumericSystem system_from_template(const Action& action, const Expr& amplitude, const NumericPoint& constants) {
    const auto coords = action.coordinates();
    NumericSystem sys;
    sys.amplitude = [=, &action](const Element& g) {
        std::map<std::string, Expr> subs;
        if (!action.is_finite()) {
            const auto& names = action.param_group().params();
            for (std::size_t k = 0; k < names.size(); ++k) {
                subs[names[k]] = g.params.at(k);
            }
        }
        return NumericAmplitude{substitute(amplitude, subs), coords, constants};
    };
    sys.map = [&action](const Element& g) { return action.diffeo(g); };
    return sys;
}

double representation_residual(const Action& action, const NumericSystem& system,
                                const std::vector<std::pair<Element, Element>>& pairs,
                                const std::vector<WaveGrid>& tests) {
    double worst = 0.0;
    for (const auto& [g1, g2] : pairs) {
        const Element g12 = action.multiply(g1, g2);
        for (const auto& psi : tests) {
            const WaveGrid two = fio_apply(system.amplitude(g2), system.map(g2), psi);
            const WaveGrid lhs = fio_apply(system.amplitude(g1), system.map(g1), two);
            const WaveGrid rhs = fio_apply(system.amplitude(g12), system.map(g12), psi);
            worst = std::max(worst, (lhs - rhs).norm() / psi.norm());
        }
    }
    return worst;
}

Expr amplitude_of_symbol(const FormalSymbol& p) {
    const Expr hbar = Expr::symbol("hbar");
    const auto xi = momentum_names(p.dimension());
    Expr out;
    for (int n = 0; n <= p.order(); ++n) {
        for (const auto& [a, f] : p.at(n)) {
            Expr term = f * hbar.pow(n - total_degree(a));
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (a[k]) {
                    term *= Expr::symbol(xi[k]).pow(a[k]);
                }
            }
            out += term;
        }
    }
    return out;
}

StandardProductResult standard_product_residual(const NumericAmplitude& a, const NumericAmplitude& b,
                                                const WaveGrid& psi) {
    const GridSpec& spec = psi.spec();
    if (spec.dimension != 1 || spec.points > 128) {
        throw NumericError("standard product quadrature runs on 1d grids with at most 128 points");
    }
    const std::size_t m = spec.points;
    const WaveGrid lhs = kn_apply(a, kn_apply(b, psi));
    const double scale_l = lhs.norm() > 0.0 ? lhs.norm() : 1.0;
    StandardProductResult r;

    // c(x_j, xi_k) = M^{-1} sum_{l,n} a(x_j, xi_n) b(x_l, xi_k) e^{i (xi_n - xi_k)(x_j - x_l)/hbar}
    const auto w = roots(m);
    const auto wi = [&](long e) { return w[static_cast<std::size_t>(((e % static_cast<long>(m)) + static_cast<long>(m)) % static_cast<long>(m))]; };
    PhaseSpaceFn fa(a.expr, a.coords, with_defaults(a.constants, spec.hbar));
    PhaseSpaceFn fb(b.expr, b.coords, with_defaults(b.constants, spec.hbar));
    std::vector<cplx> av(m * m);
    std::vector<cplx> bv(m * m);
    for (std::size_t j = 0; j < m; ++j) {
        const double x = spec.coordinate(j);
        for (std::size_t k = 0; k < m; ++k) {
            const double xi = spec.momentum(k);
            av[j * m + k] = fa(&x, &xi);
            bv[j * m + k] = fb(&x, &xi);
        }
    }
    std::vector<cplx> s(m * m);  // s(j, l) = sum_n a(j, n) w^{n (j - l)}
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = 0; l < m; ++l) {
            cplx sum = 0.0;
            const long diff = static_cast<long>(j) - static_cast<long>(l);
            for (std::size_t n = 0; n < m; ++n) {
                sum += av[j * m + n] * wi(signed_bin(n, m) * diff);
            }
            s[j * m + l] = sum;
        }
    }
    std::vector<cplx> hat = psi.data();
    fft(hat, spec, FFTW_FORWARD);
    WaveGrid quad(spec);
    for (std::size_t j = 0; j < m; ++j) {
        cplx row = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            cplx c = 0.0;
            for (std::size_t l = 0; l < m; ++l) {
                const long diff = static_cast<long>(j) - static_cast<long>(l);
                c += bv[l * m + k] * wi(-signed_bin(k, m) * diff) * s[j * m + l];
            }
            c /= static_cast<double>(m);
            row += c * hat[k] * wi(signed_bin(k, m) * static_cast<long>(j));
        }
        quad[j] = row / static_cast<double>(m);
    }
    r.quadrature_error = (lhs - quad).norm() / scale_l;

    // Closed form from the symbol calculus, available for amplitudes polynomial in xi.
    const auto xi = momentum_names(1);
    auto xi_polynomial = [&](const Expr& e) {
        for (const auto& t : e.terms()) {
            if (t.mono.exponent && mentions(Expr::from_rep(t.mono.exponent), xi)) {
                return false;
            }
            for (const auto& [s2, k] : t.mono.powers) {
                if (s2.name() == xi[0] && k < 0) {
                    return false;
                }
            }
            for (const auto& [atom, k] : t.mono.atoms) {
                Monomial mono;
                mono.atoms.emplace_back(atom, k);
                if (mentions(single(mono, Gauss(1)), xi)) {
                    return false;
                }
            }
        }
        return true;
    };
    if (xi_polynomial(a.expr) && xi_polynomial(b.expr)) {
        const int da = std::max(0, a.expr.degree_in(xi));
        const int db = std::max(0, b.expr.degree_in(xi));
        const int order = da + db;
        const FormalSymbol pa = taylor_from_amplitude({a.expr}, 1, order);
        const FormalSymbol pb = taylor_from_amplitude({b.expr}, 1, order);
        const Diffeo id = Diffeo::identity(a.coords);
        const Expr c = amplitude_of_symbol(star(pa, id, pb, id));
        NumericPoint consts = a.constants;
        for (const auto& [k, v] : b.constants) {
            consts.try_emplace(k, v);
        }
        const WaveGrid closed = kn_apply(NumericAmplitude{c, a.coords, consts}, psi);
        r.closed_form_error = (lhs - closed).norm() / scale_l;
    } else {
        r.closed_form_error = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

std::string AsymptoticResult::str() const {
    std::ostringstream out;
    out << std::setprecision(4);
    for (std::size_t i = 0; i < hbars.size(); ++i) {
        out << "hbar=" << hbars[i] << " error=" << errors[i] << "\n";
    }
    if (exact) {
        out << "slope: exact (all errors at round-off)\n";
    } else {
        out << "slope: " << slope << " spread=" << spread << (fit_ok ? "" : " (fit rejected)") << "\n";
    }
    return out.str();
}

AsymptoticResult asymptotic_consistency(const std::vector<Expr>& amplitude, const Diffeo& phi, const Expr& psi,
                                        const GridSpec& grid, const std::vector<double>& hbars, int truncation,
                                        TaylorConvention convention, const NumericPoint& constants) {
    const std::size_t d = grid.dimension;
    const auto& coords = phi.coordinates();
    const Expr hbar = Expr::symbol("hbar");
    Expr full;
    for (std::size_t k = 0; k < amplitude.size(); ++k) {
        full += amplitude[k] * hbar.pow(static_cast<int>(k));
    }
    const FormalSymbol p = taylor_from_amplitude(amplitude, d, truncation, convention);

    AsymptoticResult r;
    for (double h : hbars) {
        GridSpec spec = grid;
        spec.hbar = h;
        const WaveGrid f = WaveGrid::sample(spec, psi, coords, constants);
        const WaveGrid exact = fio_apply(NumericAmplitude{full, coords, constants}, phi, f);

        std::vector<cplx> hat = f.data();
        fft(hat, spec, FFTW_FORWARD);
        WaveGrid formal(spec);
        const NumericPoint consts = with_defaults(constants, h);
        for (int n = 0; n <= truncation; ++n) {
            for (const auto& [a, coeff] : p.at(n)) {
                // D^a psi spectrally, D = -i d
                std::vector<cplx> w(hat.size());
                for (std::size_t k = 0; k < w.size(); ++k) {
                    const auto idx = unflatten(k, spec);
                    double mult = 1.0;
                    for (std::size_t ax = 0; ax < d; ++ax) {
                        mult *= std::pow(spec.wavenumber(idx[ax]), a[ax]);
                    }
                    w[k] = hat[k] * mult / static_cast<double>(w.size());
                }
                fft(w, spec, FFTW_BACKWARD);
                WaveGrid dpsi(spec);
                dpsi.data() = std::move(w);
                const WaveGrid moved = pullback(phi, dpsi, constants);
                const auto fc = sample_x(coeff, spec, coords, consts);
                const double hn = std::pow(h, n);
                for (std::size_t i = 0; i < fc.size(); ++i) {
                    formal[i] += hn * fc[i] * moved[i];
                }
            }
        }
        r.hbars.push_back(h);
        r.errors.push_back((exact - formal).norm() / f.norm());
    }

    r.exact = std::all_of(r.errors.begin(), r.errors.end(), [](double e) { return e <= 1e-11; });
    if (r.exact || r.hbars.size() < 2) {
        return r;
    }
    // least squares on (log h, log e)
    const auto n = static_cast<double>(r.hbars.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < r.hbars.size(); ++i) {
        const double x = std::log(r.hbars[i]);
        const double y = std::log(std::max(r.errors[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - r.slope * sx) / n;
    for (std::size_t i = 0; i < r.hbars.size(); ++i) {
        const double fit = icpt + r.slope * std::log(r.hbars[i]);
        r.spread = std::max(r.spread, std::abs(std::log(std::max(r.errors[i], 1e-300)) - fit));
    }
    r.fit_ok = r.spread <= 0.2;
    return r;
}

WaveGrid gaussian(const GridSpec& spec, const std::vector<double>& center, double width,
                  const std::vector<double>& wavevector) {
    WaveGrid g(spec);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        double r2 = 0.0;
        double ph = 0.0;
        for (std::size_t a = 0; a < spec.dimension; ++a) {
            r2 += (x[a] - center.at(a)) * (x[a] - center.at(a));
            if (!wavevector.empty()) {
                ph += wavevector.at(a) * x[a];
            }
        }
        g[i] = std::polar(std::exp(-r2 / (2.0 * width * width)), ph);
    }
    return g.scaled(1.0 / g.norm());
}

}  // namespace quantact
