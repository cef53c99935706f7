#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <queue>
#include <vector>

#include "qbrown/errors.hpp"

namespace qbrown {

struct GaussRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule by Newton iteration on P_n; cached per order.
inline const GaussRule& gauss_legendre_rule(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        rule.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

inline double norm1(double v) { return std::abs(v); }
inline double norm1(const std::complex<double>& v) {
    return std::abs(v.real()) + std::abs(v.imag());
}
template <class T, size_t N>
double norm1(const std::array<T, N>& v) {
    double s = 0;
    for (const auto& e : v) s += norm1(e);
    return s;
}

namespace detail {
template <class T>
T zero_like() {
    if constexpr (std::is_arithmetic_v<T>)
        return T(0);
    else if constexpr (std::is_same_v<T, std::complex<double>>)
        return T(0.0, 0.0);
    else {
        T v{};
        return v;
    }
}
template <class T, size_t N>
void axpy(std::array<T, N>& acc, double a, const std::array<T, N>& v) {
    for (size_t i = 0; i < N; ++i) acc[i] += a * v[i];
}
inline void axpy(double& acc, double a, double v) { acc += a * v; }
inline void axpy(std::complex<double>& acc, double a, const std::complex<double>& v) {
    acc += a * v;
}
inline void scale(double& v, double a) { v *= a; }
inline void scale(std::complex<double>& v, double a) { v *= a; }
template <class T, size_t N>
void scale(std::array<T, N>& v, double a) {
    for (auto& e : v) scale(e, a);
}
} // namespace detail

template <class F>
auto gauss_integrate(F&& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre_rule(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    using T = decltype(f(mid));
    T acc = detail::zero_like<T>();
    for (int i = 0; i < n; ++i) {
        T v = f(mid + half * rule.x[i]);
        detail::axpy(acc, half * rule.w[i], v);
    }
    return acc;
}

template <class T>
struct QuadratureResult {
    T value;
    double est_rel_err;
    int evaluations;
};

// Composite Gauss over explicit breakpoints (no refinement, no error estimate).
template <class F>
auto panel_integrate(F&& f, const std::vector<double>& breakpoints, int n) {
    using T = decltype(f(breakpoints.front()));
    T acc = detail::zero_like<T>();
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
        detail::axpy(acc, 1.0, gauss_integrate(f, breakpoints[i], breakpoints[i + 1], n));
    return acc;
}

// Adaptive bisection over an initial panel set. Each panel carries a coarse
// estimate (one Gauss rule) and a fine one (two half-rules); the worst panel by
// |fine - coarse| is split until the summed discrepancy meets rel_tol. The
// refinement order is deterministic (ties broken by panel position).
template <class F>
auto adaptive_integrate(F&& f, const std::vector<double>& breakpoints, int n,
                        double rel_tol, double abs_floor = 0.0,
                        int max_panels = 40000) {
    using T = decltype(f(breakpoints.front()));

    struct Panel {
        double a, b, err;
        T coarse, fine_left, fine_right;
    };
    struct Worse {
        bool operator()(const Panel& p, const Panel& q) const {
            if (p.err != q.err) return p.err < q.err;
            return p.a > q.a;
        }
    };

    int evals = 0;
    auto make_panel = [&](double a, double b, const T* known_coarse) {
        Panel p;
        p.a = a;
        p.b = b;
        const double m = 0.5 * (a + b);
        p.coarse = known_coarse ? *known_coarse : gauss_integrate(f, a, b, n);
        p.fine_left = gauss_integrate(f, a, m, n);
        p.fine_right = gauss_integrate(f, m, b, n);
        evals += known_coarse ? 2 * n : 3 * n;
        T diff = p.fine_left;
        detail::axpy(diff, 1.0, p.fine_right);
        detail::axpy(diff, -1.0, p.coarse);
        p.err = norm1(diff);
        return p;
    };

    std::priority_queue<Panel, std::vector<Panel>, Worse> heap;
    T total = detail::zero_like<T>();
    double total_err = 0.0;
    int n_panels = 0;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        Panel p = make_panel(breakpoints[i], breakpoints[i + 1], nullptr);
        detail::axpy(total, 1.0, p.fine_left);
        detail::axpy(total, 1.0, p.fine_right);
        total_err += p.err;
        heap.push(std::move(p));
        ++n_panels;
    }

    auto tol_met = [&] {
        return total_err <= rel_tol * std::max(norm1(total), abs_floor);
    };

    while (!tol_met() && n_panels < max_panels) {
        Panel worst = heap.top();
        heap.pop();
        total_err -= worst.err;
        const double m = 0.5 * (worst.a + worst.b);
        Panel left = make_panel(worst.a, m, &worst.fine_left);
        Panel right = make_panel(m, worst.b, &worst.fine_right);
        // replace the parent's fine value by the children's in the running sum
        detail::axpy(total, -1.0, worst.fine_left);
        detail::axpy(total, -1.0, worst.fine_right);
        detail::axpy(total, 1.0, left.fine_left);
        detail::axpy(total, 1.0, left.fine_right);
        detail::axpy(total, 1.0, right.fine_left);
        detail::axpy(total, 1.0, right.fine_right);
        total_err += left.err + right.err;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++n_panels;
    }

    QuadratureResult<T> res;
    res.value = total;
    res.est_rel_err = total_err / std::max(norm1(total), abs_floor > 0 ? abs_floor : 1e-300);
    res.evaluations = evals;
    if (!tol_met())
        throw quadrature_error("adaptive_integrate: tolerance not reached", res.est_rel_err);
    return res;
}

// Abel-summed oscillatory tail: integrate half-period segments starting at `a`
// and collapse the alternating partial sums by repeated pairwise averaging.
// Handles envelopes that grow polynomially (each averaging pass reduces the
// polynomial degree of the residual by one).
template <class F>
auto oscillatory_tail(F&& f, double a, double half_period, int n_terms, int gl_n = 16) {
    using T = decltype(f(a));
    std::vector<T> w(n_terms);
    T run = detail::zero_like<T>();
    for (int k = 0; k < n_terms; ++k) {
        detail::axpy(run, 1.0,
                     gauss_integrate(f, a + k * half_period, a + (k + 1) * half_period, gl_n));
        w[k] = run;
    }
    T prev_front = w.front();
    double last_delta = norm1(prev_front);
    for (int pass = 0; pass + 1 < n_terms; ++pass) {
        for (size_t i = 0; i + 1 < w.size(); ++i) {
            detail::axpy(w[i], 1.0, w[i + 1]);
            detail::scale(w[i], 0.5);
        }
        w.pop_back();
        T d = w.front();
        detail::axpy(d, -1.0, prev_front);
        last_delta = norm1(d);
        prev_front = w.front();
    }
    QuadratureResult<T> res;
    res.value = w.front();
    res.est_rel_err = last_delta / std::max(norm1(w.front()), 1e-300);
    res.evaluations = n_terms * gl_n;
    return res;
}

} // namespace qbrown
