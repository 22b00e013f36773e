#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lmio/constants.hpp"

namespace lmio {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// 3x3 complex tensor in a fixed Cartesian frame.

struct Complex3Tensor {
    std::array<std::array<cplx, 3>, 3> m{};

    cplx& operator()(int i, int j) { return m[i][j]; }
    const cplx& operator()(int i, int j) const { return m[i][j]; }

    Complex3Tensor& operator+=(const Complex3Tensor& o) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    Complex3Tensor& operator-=(const Complex3Tensor& o) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] -= o.m[i][j];
        return *this;
    }
    Complex3Tensor& operator*=(const cplx& a) {
        for (auto& row : m)
            for (auto& x : row) x *= a;
        return *this;
    }
    friend Complex3Tensor operator+(Complex3Tensor a, const Complex3Tensor& b) { return a += b; }
    friend Complex3Tensor operator-(Complex3Tensor a, const Complex3Tensor& b) { return a -= b; }
    friend Complex3Tensor operator*(const cplx& a, Complex3Tensor t) { return t *= a; }
    friend Complex3Tensor operator*(double a, Complex3Tensor t) { return t *= cplx(a); }

    Complex3Tensor transpose() const {
        Complex3Tensor t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
        return t;
    }
    Complex3Tensor adjoint() const {
        Complex3Tensor t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.m[i][j] = std::conj(m[j][i]);
        return t;
    }
    double frobenius() const {
        double s = 0;
        for (const auto& row : m)
            for (const auto& x : row) s += std::norm(x);
        return std::sqrt(s);
    }
    double max_abs() const {
        double s = 0;
        for (const auto& row : m)
            for (const auto& x : row) s = std::max(s, std::abs(x));
        return s;
    }
    bool all_finite() const {
        for (const auto& row : m)
            for (const auto& x : row)
                if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
        return true;
    }
};

using CVec3 = std::array<cplx, 3>;

inline Complex3Tensor outer(const CVec3& a, const CVec3& b) {
    Complex3Tensor t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.m[i][j] = a[i] * b[j];
    return t;
}

inline Complex3Tensor matmul(const Complex3Tensor& a, const Complex3Tensor& b) {
    Complex3Tensor t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx s = 0;
            for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
            t.m[i][j] = s;
        }
    return t;
}

// ---------------------------------------------------------------------------
// Bessel functions of the first kind.

struct BesselJ {
    double j;
    double jp;
};

// J_n(x) and J_n'(x); relative accuracy better than 1e-12 for x <= 100.
BesselJ bessel_j(int n, double x);

// J_n(x)/x with the analytic x -> 0 limit (n >= 1).
double jn_over_x(int n, double x);

// ---------------------------------------------------------------------------
// Axial wavenumber h = sqrt(k^2 - lambda^2).
//
// Branch: Im h >= 0, and Re h >= 0 when Im h == 0, so that e^{ihz} decays for
// growing z in absorbing/evanescent channels.

cplx wavenumber(cplx eps, double omega, double c);
cplx axial_wavenumber(cplx eps, double omega, double lambda, double c = Units::si().c);
// Analytic continuation off the real lambda axis (pole searches).
cplx axial_wavenumber_c(cplx eps, double omega, cplx lambda, double c = Units::si().c);

// ---------------------------------------------------------------------------
// Adaptive quadrature over the spectral variable.

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-30;
    int max_subdivisions = 4000;
    double lambda_max = 0.0;   // 0 = derive from context (20 * max_j |k_j|)

    void validate() const;     // throws std::invalid_argument
};

struct SpectralResult {
    cplx value{0.0};
    double error_bound = 0.0;
    bool converged = false;
    int intervals = 0;
};

// Integrates f over (0, spec.lambda_max). The integration path is subdivided
// at each supplied breakpoint (branch-point magnitudes |k_j|), and the
// evanescent tail beyond lambda_max is estimated from the integrand's decay
// rate and added to the error bound. Non-convergence is reported through the
// flag; the best estimate and bound are always returned.
SpectralResult integrate_spectral(const std::function<cplx(double)>& f,
                                  const QuadratureSpec& spec,
                                  const std::vector<double>& breakpoints = {});

// ---------------------------------------------------------------------------
// Complex root finding (damped Newton, numerically estimated derivative).

struct RootResult {
    cplx root{0.0};
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

RootResult find_root_complex(const std::function<cplx(cplx)>& f, cplx seed,
                             double tol, int max_iter = 200);

// ---------------------------------------------------------------------------
// Generic adaptive Gauss7/Kronrod15 kernel, shared by the scalar spectral
// integral and the tensor-valued Green assembly.

namespace detail {

inline const double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline const double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights attach to gk_x indices 1, 3, 5 and the center node.
inline const double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class T>
struct Interval {
    double a, b;
    T val;
    double err;
};

template <class T, class F, class Norm>
Interval<T> gk15(F&& f, double a, double b, Norm&& norm) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    T fc = f(c);
    T k15 = gk_wk[7] * fc;
    T g7 = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = hw * gk_x[i];
        T fs = f(c + dx) + f(c - dx);
        k15 += gk_wk[i] * fs;
        if (i % 2 == 1) g7 += gk_wg[i / 2] * fs;
    }
    k15 *= cplx(hw);
    g7 *= cplx(hw);
    return {a, b, k15, norm(k15 - g7)};
}

template <class T>
struct AdaptiveOut {
    T value;
    double error;
    bool converged;
    int intervals;
};

// Adaptive integration of f over [a, b] with the path split at each branch
// point. Segments that end on a branch point are integrated under the
// square-root substitution lambda = b -+ u^2, which removes the integrable
// 1/sqrt singularity of 1/h there; non-finite node values (the branch point
// itself) are treated as zero.
template <class T, class F, class Norm>
AdaptiveOut<T> adaptive_gk(F&& f, double a, double b, std::vector<double> forced,
                           double rel_tol, double abs_tol, int max_intervals,
                           Norm&& norm) {
    std::vector<double> cuts{a, b};
    for (double x : forced)
        if (x > a + 1e-13 * (b - a) && x < b - 1e-13 * (b - a)) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double u, double v) { return v - u < 1e-13 * (b - a); }),
               cuts.end());
    auto is_branch = [&](double x) {
        for (double y : forced)
            if (x == y) return true;
        return false;
    };

    auto sane = [&](T v) {
        const double n = norm(v);
        if (std::isnan(n) || std::isinf(n)) return T{};
        return v;
    };

    // mapped segment integrands over a u-coordinate
    std::vector<std::function<T(double)>> funcs;
    std::vector<std::pair<double, double>> domains;
    auto add_segment = [&](double c0, double c1, bool sing_lo, bool sing_hi) {
        if (sing_lo && sing_hi) {
            // split so each piece has one singular end
            const double mid = 0.5 * (c0 + c1);
            const double w0 = std::sqrt(mid - c0), w1 = std::sqrt(c1 - mid);
            funcs.push_back([&f, &sane, c0](double u) { return sane(cplx(2.0 * u) * f(c0 + u * u)); });
            domains.push_back({0.0, w0});
            funcs.push_back([&f, &sane, c1](double u) { return sane(cplx(2.0 * u) * f(c1 - u * u)); });
            domains.push_back({0.0, w1});
        } else if (sing_hi) {
            funcs.push_back([&f, &sane, c1](double u) { return sane(cplx(2.0 * u) * f(c1 - u * u)); });
            domains.push_back({0.0, std::sqrt(c1 - c0)});
        } else if (sing_lo) {
            funcs.push_back([&f, &sane, c0](double u) { return sane(cplx(2.0 * u) * f(c0 + u * u)); });
            domains.push_back({0.0, std::sqrt(c1 - c0)});
        } else {
            funcs.push_back([&f, &sane](double u) { return sane(f(u)); });
            domains.push_back({c0, c1});
        }
    };
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        add_segment(cuts[i], cuts[i + 1], is_branch(cuts[i]), is_branch(cuts[i + 1]));

    struct Seg {
        int id;
        Interval<T> iv;
    };
    auto cmp = [](const Seg& u, const Seg& v) { return u.iv.err < v.iv.err; };
    std::vector<Seg> heap;
    for (size_t i = 0; i < funcs.size(); ++i)
        heap.push_back({static_cast<int>(i),
                        gk15<T>(funcs[i], domains[i].first, domains[i].second, norm)});
    std::make_heap(heap.begin(), heap.end(), cmp);

    auto total = [&]() {
        T v = heap.front().iv.val;
        double e = heap.front().iv.err;
        for (size_t i = 1; i < heap.size(); ++i) {
            v += heap[i].iv.val;
            e += heap[i].iv.err;
        }
        return std::pair<T, double>(v, e);
    };

    while (true) {
        auto [v, e] = total();
        const double tol = std::max(abs_tol, rel_tol * norm(v));
        if (e <= tol) return {v, e, true, static_cast<int>(heap.size())};
        if (static_cast<int>(heap.size()) >= max_intervals)
            return {v, e, false, static_cast<int>(heap.size())};
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Seg w = heap.back();
        const double mid = 0.5 * (w.iv.a + w.iv.b);
        if (!(mid > w.iv.a && mid < w.iv.b)) {
            // interval at rounding resolution; keep its error in the bound
            auto [v2, e2] = total();
            return {v2, e2, e2 <= tol, static_cast<int>(heap.size())};
        }
        heap.pop_back();
        heap.push_back({w.id, gk15<T>(funcs[w.id], w.iv.a, mid, norm)});
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back({w.id, gk15<T>(funcs[w.id], mid, w.iv.b, norm)});
        std::push_heap(heap.begin(), heap.end(), cmp);
    }
}

// Decay-rate tail estimate for the truncated spectral integral.
double tail_bound(double norm_inner, double norm_end, double dx, double lambda_max);

} // namespace detail

} // namespace lmio
