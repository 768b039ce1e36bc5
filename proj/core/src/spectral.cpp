#include "treebound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace treebound {

namespace {

// Double-double scalar: value = hi + lo with |lo| <= ulp(hi)/2.
// Only what the char-poly recursion needs.
struct DD {
    double hi = 0.0;
    double lo = 0.0;
};

DD two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

DD two_diff(double a, double b) {
    const double s = a - b;
    const double bb = s - a;
    return {s, (a - (s - bb)) - (b + bb)};
}

DD two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

DD renorm(double hi, double lo) {
    const double s = hi + lo;
    return {s, lo - (s - hi)};
}

DD dd_add(DD a, DD b) {
    const DD s = two_sum(a.hi, b.hi);
    return renorm(s.hi, s.lo + a.lo + b.lo);
}

DD dd_sub(DD a, DD b) { return dd_add(a, {-b.hi, -b.lo}); }

DD dd_mul(DD a, DD b) {
    const DD p = two_prod(a.hi, b.hi);
    return renorm(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

void require_depth(int depth, const char* where) {
    if (depth < 1) {
        throw std::invalid_argument(std::string(where) + ": depth must be >= 1");
    }
}

// chi_T(s) as value * 2^exponent: the recursion's magnitudes shrink like
// max(s - b*, a*)^T and underflow doubles near T ~ 700, which would erase the
// sign the bisection steers by. Rescaling keeps the significand in range; the
// power term shares the exponent so the recursion stays a plain fused step.
struct ScaledChi {
    DD value;
    int exponent;
};

ScaledChi char_poly_eval_scaled(int depth, const StarParams& sp, double s) {
    const double as = sp.alpha_star;
    const double bs = sp.beta_star;
    DD chi = dd_add(two_diff(s, 1.0), DD{as, 0.0});  // chi_1 = s - 1 + a*
    if (depth == 1) return {chi, 0};
    const DD shift = two_diff(s, bs);
    const DD tail = dd_sub(two_diff(1.0, as), DD{bs, 0.0});  // 1 - a* - b*
    DD apow{1.0, 0.0};                                       // a*^(k-1), shares the exponent
    int exponent = 0;
    for (int k = 2; k <= depth; ++k) {
        apow = dd_mul(apow, DD{as, 0.0});
        chi = dd_sub(dd_mul(shift, chi), dd_mul(apow, tail));
        const double mag = std::max(std::abs(chi.hi), apow.hi);
        if (mag != 0.0 && mag < 0x1.0p-400) {
            chi.hi = std::ldexp(chi.hi, 400);
            chi.lo = std::ldexp(chi.lo, 400);
            apow.hi = std::ldexp(apow.hi, 400);
            apow.lo = std::ldexp(apow.lo, 400);
            exponent -= 400;
        } else if (mag > 0x1.0p400) {
            chi.hi = std::ldexp(chi.hi, -400);
            chi.lo = std::ldexp(chi.lo, -400);
            apow.hi = std::ldexp(apow.hi, -400);
            apow.lo = std::ldexp(apow.lo, -400);
            exponent += 400;
        }
    }
    return {chi, exponent};
}

int sign_of(const ScaledChi& chi) {
    if (chi.value.hi > 0.0) return 1;
    if (chi.value.hi < 0.0) return -1;
    return 0;
}

StarParams require_star(const StarParams& sp, const char* where) {
    if (auto err = validate_star_params(sp)) {
        throw std::domain_error(std::string(where) + ": " + *err);
    }
    return sp;
}

}  // namespace

DenseMatrix build_zeta(int depth, const StarParams& sp) {
    require_depth(depth, "build_zeta");
    require_star(sp, "build_zeta");
    const auto t = static_cast<std::size_t>(depth);
    const double tail = 1.0 - sp.alpha_star - sp.beta_star;
    DenseMatrix m(t, t);
    for (std::size_t i = 0; i < t; ++i) {
        m(i, t - 1) += tail;
        m(i, i) += sp.beta_star;
        if (i > 0) m(i, i - 1) += sp.alpha_star;
    }
    return m;
}

DenseMatrix build_comparison_matrix(int depth, const StarParams& sp) {
    require_depth(depth, "build_comparison_matrix");
    const DenseMatrix zeta = build_zeta(depth, sp);
    const auto t = static_cast<std::size_t>(depth);
    DenseMatrix m(t + 1, t + 1);
    m(0, 0) = 1.0;
    m(1, 0) = sp.alpha_star;
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) m(i + 1, j + 1) = zeta(i, j);
    }
    return m;
}

double char_poly_eval(int depth, const StarParams& sp, double s) {
    require_depth(depth, "char_poly_eval");
    require_star(sp, "char_poly_eval");
    const ScaledChi chi = char_poly_eval_scaled(depth, sp, s);
    return std::ldexp(chi.value.hi, chi.exponent);
}

std::string to_string(RhoMethod m) {
    switch (m) {
        case RhoMethod::CharPolyBisection: return "charpoly-bisection";
        case RhoMethod::PowerIteration: return "power-iteration";
    }
    return "unknown";
}

BoundReport rho_bound(int depth, const StarParams& sp) {
    require_depth(depth, "rho_bound");
    require_star(sp, "rho_bound");
    BoundReport report;
    report.depth = depth;
    report.star = sp;
    report.method = RhoMethod::CharPolyBisection;

    const double as = sp.alpha_star;
    const double bs = sp.beta_star;
    if (as == 0.0) {  // chi_T(s) = (s - b*)^(T-1) (s - 1)
        report.rho = 1.0;
        return report;
    }
    if (as + bs == 1.0) {  // chi_T(s) = (s - b*)^T
        report.rho = bs;
        return report;
    }

    double lo = std::max(1.0 - as, bs);
    double hi = 1.0;
    // Signs come from the scaled evaluation: the raw value underflows for
    // large depth and its sign is the one thing bisection must not lose.
    if (sign_of(char_poly_eval_scaled(depth, sp, lo)) >= 0) {
        report.rho = lo;  // the bracket edge already is the root (depth 1)
        report.residual = std::abs(char_poly_eval(depth, sp, lo));
        return report;
    }
    // The upper endpoint needs no evaluation: chi_T(1) = a*^T > 0 exactly.
    // Once a*^T falls below the recursion's resolution (deep T, small a*),
    // the evaluated sign at 1 is amplification noise and must not be
    // consulted; the root then sits within an ulp of 1 and bisection
    // converges onto it.

    int iter = 0;
    while (iter < 200) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;  // adjacent doubles: nothing left to split
        ++iter;
        if (sign_of(char_poly_eval_scaled(depth, sp, mid)) < 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    report.rho = hi;  // chi(hi) >= 0, root within one ulp below
    report.iterations = iter;
    report.residual = std::abs(char_poly_eval(depth, sp, hi));
    return report;
}

PowerIterationResult spectral_radius_power(const DenseMatrix& m, double tol, int max_iter) {
    if (!m.square() || m.rows() == 0) {
        throw std::invalid_argument("spectral_radius_power: nonempty square matrix required");
    }
    if (m.min_entry() < 0.0) {
        throw std::invalid_argument("spectral_radius_power: entries must be nonnegative");
    }
    const std::size_t n = m.rows();
    std::vector<double> v(n, 1.0);
    PowerIterationResult res;
    double rayleigh_prev = std::numeric_limits<double>::quiet_NaN();

    for (int iter = 1; iter <= max_iter; ++iter) {
        res.iterations = iter;
        const std::vector<double> w = m.apply(v);

        double wmax = 0.0;
        for (double x : w) wmax = std::max(wmax, std::abs(x));
        if (wmax == 0.0) {  // fell into the kernel: nilpotent direction, radius 0
            res.converged = true;
            res.value = 0.0;
            res.enclosure = 0.0;
            return res;
        }

        // Ratio enclosure: for strictly positive v, the spectral radius lies
        // between the smallest and largest componentwise ratio.
        double rmin = std::numeric_limits<double>::infinity();
        double rmax = 0.0;
        bool all_positive = true;
        double vw = 0.0, vv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            vw += v[i] * w[i];
            vv += v[i] * v[i];
            if (v[i] > 0.0) {
                const double r = w[i] / v[i];
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
            } else {
                all_positive = false;
            }
        }
        const double rayleigh = vw / vv;

        if (all_positive && rmax - rmin <= tol * std::max(1.0, rmax)) {
            res.converged = true;
            res.value = 0.5 * (rmin + rmax);
            res.enclosure = rmax - rmin;
            return res;
        }
        if (!all_positive && !std::isnan(rayleigh_prev) &&
            std::abs(rayleigh - rayleigh_prev) <= tol) {
            res.converged = true;
            res.value = rayleigh;
            res.enclosure = std::abs(rayleigh - rayleigh_prev);
            return res;
        }

        rayleigh_prev = rayleigh;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wmax;
        res.value = rayleigh;
        res.enclosure = rmax - rmin;
    }
    res.converged = false;
    return res;
}

double classical_bound(int depth, double a) {
    require_depth(depth, "classical_bound");
    if (!(a >= 0.0 && a <= 1.0)) {
        throw std::domain_error("classical_bound: a outside [0, 1]");
    }
    return std::pow(1.0 - std::pow(a, depth), 1.0 / depth);
}

double spectral_gap_ratio(int depth, const StarParams& sp, double a_classical) {
    require_depth(depth, "spectral_gap_ratio");
    if (!(a_classical > 0.0 && a_classical <= 1.0)) {
        throw std::domain_error("spectral_gap_ratio: a_classical outside (0, 1]");
    }
    const double gap = 1.0 - rho_bound(depth, sp).rho;
    // 1 - (1 - a^T)^(1/T), kept in gap form; for small a both gaps are ~a^T and
    // forming the bound first would cancel them away.
    const double classical_gap =
        -std::expm1(std::log1p(-std::pow(a_classical, depth)) / depth);
    return gap / classical_gap;
}

std::optional<long long> rho_threshold_depth(const StarParams& sp) {
    require_star(sp, "rho_threshold_depth");
    if (sp.alpha_star + sp.beta_star == 1.0) return std::nullopt;
    const double denom = (1.0 - sp.alpha_star) - sp.beta_star;
    if (!(denom > 0.0)) return std::nullopt;
    const double ratio = sp.alpha_star / denom;
    if (!(ratio < 4.0e18)) return std::nullopt;  // not representable: treat as unbounded
    return static_cast<long long>(std::floor(ratio + 1e-12));
}

double rho_asymptotic(int depth, const StarParams& sp) {
    require_depth(depth, "rho_asymptotic");
    require_star(sp, "rho_asymptotic");
    if (!(sp.alpha_star > 0.0)) {
        throw std::domain_error("rho_asymptotic: alpha_star must be positive");
    }
    if (!(sp.beta_star < 1.0)) {
        throw std::domain_error("rho_asymptotic: beta_star must be below 1");
    }
    if (!(sp.alpha_star + sp.beta_star < 1.0)) {
        throw std::domain_error("rho_asymptotic: alpha_star + beta_star must be below 1");
    }
    const double decay = sp.alpha_star / (1.0 - sp.beta_star);
    return 1.0 - (1.0 - sp.alpha_star - sp.beta_star) * std::pow(decay, depth);
}

}  // namespace treebound
