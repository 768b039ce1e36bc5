#pragma once

#include <optional>
#include <string>

#include "treebound/matrix.hpp"
#include "treebound/params.hpp"

namespace treebound {

// The T x T comparison kernel
//   zeta_T = (1 - a* - b*) * ones*e_T' + b* * I_T + a* * J_T
// (J_T has ones on the subdiagonal). Entrywise, 1-based:
//   zeta(i,j) = (1-a*-b*)[j=T] + b*[i=j] + a*[i=j+1].
// Every entry is nonnegative and every row sums to at most 1.
DenseMatrix build_zeta(int depth, const StarParams& sp);

// The (T+1) x (T+1) block matrix dominating the diameter recursion:
//   [ 1          0   ]
//   [ (a*,0..0)' zeta ]
DenseMatrix build_comparison_matrix(int depth, const StarParams& sp);

// chi_T(s) = det(s I - zeta_T), evaluated by the recursion
//   chi_1(s) = s - 1 + a*,   chi_T(s) = (s - b*) chi_{T-1}(s) - a*^(T-1) (1 - a* - b*).
// Evaluated internally in compensated (double-double) arithmetic: near s = 1 the
// recursion cancels down to a*^T, and rounding errors grow like ((1-b*)/a*)^T,
// which plain doubles cannot absorb for small a*.
double char_poly_eval(int depth, const StarParams& sp, double s);

enum class RhoMethod {
    CharPolyBisection,
    PowerIteration,
};

std::string to_string(RhoMethod m);

struct BoundReport {
    int depth = 0;
    StarParams star;
    double rho = 0.0;
    RhoMethod method = RhoMethod::CharPolyBisection;
    int iterations = 0;
    double residual = 0.0;  // |chi_depth(rho)|
};

// Contraction-rate bound rho_T(a*, b*): the largest real root of chi_T, located by
// sign-change bisection on [max(1-a*, b*), 1]. Both endpoint signs are
// guaranteed: chi_T(lower) <= 0 and chi_T(1) = a*^T > 0 (the latter is used as
// an identity, never evaluated, since a*^T drops below any evaluation noise
// for deep recursions). The bracket is narrowed to floating-point exhaustion
// (typically ~60 halvings, capped at 200), so the result is accurate to an
// ulp; 1e-12 is the guaranteed absolute tolerance. Degenerate cases are
// closed-form:
//   a* = 0        -> rho = 1
//   a* + b* = 1   -> rho = b*          (chi_T(s) = (s - b*)^T)
// Throws std::domain_error on invalid star parameters and std::invalid_argument
// on depth < 1.
BoundReport rho_bound(int depth, const StarParams& sp);

struct PowerIterationResult {
    bool converged = false;
    double value = 0.0;
    int iterations = 0;
    // Width of the final min/max ratio enclosure when the iterate stayed positive,
    // else the last Rayleigh-quotient change.
    double enclosure = 0.0;
};

// Power iteration from the all-ones vector for entrywise-nonnegative square M.
// Cross-check oracle for rho_bound, not a general eigensolver: convergence is
// only guaranteed for matrices with a dominant real eigenvalue; nilpotent and
// defective cases report non-convergence (or reach the zero vector, which is
// returned as value 0). Callers fall back to the char-poly route.
PowerIterationResult spectral_radius_power(const DenseMatrix& m, double tol = 1e-10,
                                           int max_iter = 100000);

// Prior-art estimate (1 - a^T)^(1/T) from a uniform entry lower bound a.
double classical_bound(int depth, double a);

// (1 - rho_T(a*, b*)) / (1 - classical_bound(T, a_classical)).
// Both gaps are computed cancellation-free (the classical one via expm1/log1p);
// for a* ~ 1e-3 the gaps are ~a*^T and naive 1-x differences would lose them.
// Throws std::domain_error unless a_classical lies in (0, 1]; at a_classical = 0
// the classical gap vanishes and the ratio is undefined.
double spectral_gap_ratio(int depth, const StarParams& sp, double a_classical);

// Largest T with rho_T(a*, b*) <= a* + b*: floor(a* / (1 - a* - b*)), with a
// 1e-12 guard against the ratio rounding just below an integer boundary.
// nullopt means unbounded (a* + b* = 1, or the floor exceeds the integer range).
std::optional<long long> rho_threshold_depth(const StarParams& sp);

// Leading-order expansion 1 - (1-a*-b*) (a*/(1-b*))^T of rho_T for large T.
// Requires a* > 0, b* < 1 and a* + b* < 1 (throws std::domain_error otherwise).
double rho_asymptotic(int depth, const StarParams& sp);

}  // namespace treebound
