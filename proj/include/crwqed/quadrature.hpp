// quadrature.hpp — composite Gauss-Legendre panels with optional graded
// refinement around known sharp features (narrow Lorentzian-like resonances).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace crw {

// Nodes/weights of n-point Gauss-Legendre on [-1, 1], by Newton iteration on
// the Legendre polynomial. Deterministic; cached per order by the caller.
struct GaussLegendre {
    std::vector<double> node;
    std::vector<double> weight;

    explicit GaussLegendre(int n) {
        node.resize(static_cast<std::size_t>(n));
        weight.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            // Chebyshev-based initial guess
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            node[static_cast<std::size_t>(i)] = x;
            weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    static const GaussLegendre& order12() {
        static const GaussLegendre gl(12);
        return gl;
    }
};

// A feature worth resolving: center and characteristic half-width in the
// integration variable.
struct QuadFeature {
    double center = 0.0;
    double width = 0.0;
};

// Panel breakpoints over [a, b]: `base` uniform panels, then each feature gets
// a geometric cascade of shrinking panels down to ~width/4 on both sides.
inline std::vector<double> panel_breakpoints(double a, double b, int base,
                                             const std::vector<QuadFeature>& features = {}) {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(base) + 1);
    for (int i = 0; i <= base; ++i)
        pts.push_back(a + (b - a) * static_cast<double>(i) / base);

    const double base_h = (b - a) / base;
    for (const auto& ft : features) {
        if (ft.center <= a || ft.center >= b) continue;
        // The cascade cost is logarithmic in the width, so the floor sits just
        // above the double-precision resolution of the breakpoints themselves.
        double w = std::max(ft.width, 1e-14 * (b - a));
        if (w >= base_h) continue; // already resolved
        // halving cascade from the base panel width down to w/4
        for (double h = base_h / 2.0; h > w / 4.0; h /= 2.0) {
            if (ft.center - h > a) pts.push_back(ft.center - h);
            if (ft.center + h < b) pts.push_back(ft.center + h);
        }
        pts.push_back(ft.center);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Composite Gauss-Legendre over the given breakpoints.
template <typename F>
auto integrate_panels(F&& f, const std::vector<double>& breaks,
                      const GaussLegendre& gl = GaussLegendre::order12())
    -> decltype(f(0.0)) {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double lo = breaks[p], hi = breaks[p + 1];
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gl.node.size(); ++i)
            acc += (half * gl.weight[i]) * f(mid + half * gl.node[i]);
    }
    return acc;
}

// Convenience: uniform panels with optional features, single call.
template <typename F>
auto integrate(F&& f, double a, double b, int base_panels,
               const std::vector<QuadFeature>& features = {}) -> decltype(f(0.0)) {
    return integrate_panels(std::forward<F>(f), panel_breakpoints(a, b, base_panels, features));
}

} // namespace crw
