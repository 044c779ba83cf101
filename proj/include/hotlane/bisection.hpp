#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "hotlane/errors.hpp"

namespace hotlane {

struct BisectionOptions {
    double tolerance = 1e-12;  // absolute, on the bracket width
    int max_iterations = 200;
};

struct BisectionResult {
    double root = 0.0;
    int iterations = 0;
};

/// Root of a continuous `fn` on [lo, hi] by bisection. `fn(lo)` and `fn(hi)`
/// must differ in sign (or one of them vanish); the direction of monotonicity
/// does not matter. Once the bracket is narrower than the tolerance, the
/// midpoint is returned as soon as `accept(mid)` holds or the bracket can no
/// longer be split.
template <class Fn, class Accept>
BisectionResult bisect(Fn&& fn, double lo, double hi, const BisectionOptions& opts, Accept&& accept) {
    if (!(lo < hi)) {
        std::ostringstream msg;
        msg << "empty bracket [" << lo << ", " << hi << "]";
        throw SolverError(SolverErrorKind::BracketFailure, msg.str());
    }
    double f_lo = fn(lo);
    const double f_hi = fn(hi);
    if (std::isnan(f_lo) || std::isnan(f_hi)) {
        throw SolverError(SolverErrorKind::BracketFailure, "function is NaN at a bracket end");
    }
    if (f_lo == 0.0) return {lo, 0};
    if (f_hi == 0.0) return {hi, 0};
    if (std::signbit(f_lo) == std::signbit(f_hi)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << f_lo << ", f(hi)=" << f_hi;
        throw SolverError(SolverErrorKind::BracketFailure, msg.str());
    }

    for (int it = 1; it <= opts.max_iterations; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        const double f_mid = fn(mid);
        if (std::isnan(f_mid)) {
            throw SolverError(SolverErrorKind::NoConvergence, "function became NaN inside the bracket");
        }
        if (f_mid == 0.0) return {mid, it};
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= opts.tolerance) {
            const double root = lo + 0.5 * (hi - lo);
            if (root == lo || root == hi || accept(root)) return {root, it};
        }
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "bracket width " << (hi - lo) << " after " << opts.max_iterations << " iterations";
    throw SolverError(SolverErrorKind::NoConvergence, msg.str());
}

template <class Fn>
BisectionResult bisect(Fn&& fn, double lo, double hi, const BisectionOptions& opts = {}) {
    return bisect(std::forward<Fn>(fn), lo, hi, opts, [](double) { return true; });
}

}  // namespace hotlane
