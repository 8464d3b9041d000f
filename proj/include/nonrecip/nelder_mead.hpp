#pragma once

// Deterministic Nelder-Mead simplex minimiser (standard coefficients:
// reflection 1, expansion 2, contraction 1/2, shrink 1/2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace nonrecip {

struct NelderMeadOptions {
    int max_evaluations = 2000;
    double diameter_tolerance = 1e-8;
    std::vector<double> initial_step;  // per coordinate; empty means 0.05
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::vector<double> trace;  // best value after each iteration
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0, const NelderMeadOptions& opts = {}) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);

    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        return f(x);
    };
    for (std::size_t k = 0; k < n; ++k) {
        double step = k < opts.initial_step.size() ? opts.initial_step[k] : 0.05;
        pts[k + 1][k] += step;
    }
    for (std::size_t k = 0; k <= n; ++k) vals[k] = eval(pts[k]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // stable on ties so runs are reproducible
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            p2[k] = std::move(pts[order[k]]);
            v2[k] = vals[order[k]];
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += (pts[k][c] - pts[0][c]) * (pts[k][c] - pts[0][c]);
            d = std::max(d, std::sqrt(s));
        }
        return d;
    };
    auto blend = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        std::vector<double> out(n);
        for (std::size_t c = 0; c < n; ++c) out[c] = a[c] + t * (b[c] - a[c]);
        return out;
    };

    sort_simplex();
    while (true) {
        if (diameter() < opts.diameter_tolerance) {
            res.converged = true;
            break;
        }
        if (res.evaluations + static_cast<int>(n) + 2 > opts.max_evaluations) break;
        ++res.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t c = 0; c < n; ++c) centroid[c] += pts[k][c] / static_cast<double>(n);

        auto xr = blend(centroid, pts[n], -1.0);
        double fr = eval(xr);
        if (fr < vals[0]) {
            auto xe = blend(centroid, pts[n], -2.0);
            double fe = eval(xe);
            if (fe < fr) {
                pts[n] = std::move(xe);
                vals[n] = fe;
            } else {
                pts[n] = std::move(xr);
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = std::move(xr);
            vals[n] = fr;
        } else {
            bool outside = fr < vals[n];
            auto xc = outside ? blend(centroid, xr, 0.5) : blend(centroid, pts[n], 0.5);
            double fc = eval(xc);
            if (fc < (outside ? fr : vals[n])) {
                pts[n] = std::move(xc);
                vals[n] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    pts[k] = blend(pts[0], pts[k], 0.5);
                    vals[k] = eval(pts[k]);
                }
            }
        }
        sort_simplex();
        res.trace.push_back(vals[0]);
    }
    res.x = pts[0];
    res.value = vals[0];
    return res;
}

}  // namespace nonrecip
