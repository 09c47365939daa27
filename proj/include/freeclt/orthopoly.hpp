#pragma once

#include <functional>
#include <string>
#include <vector>

#include "freeclt/common.hpp"

namespace freeclt::orthopoly {

// Two orthogonal families, both monic: probabilists' Hermite H_n against the
// standard normal weight (||H_n||^2 = n!), and second-kind Chebyshev U_n on
// [-2,2] against the semicircle weight (||U_n||^2 = 1).
enum class Basis { Hermite, Chebyshev };

std::string basis_name(Basis b);
Basis basis_from_name(const std::string& name);

inline constexpr int kMaxDegree = 60;
inline constexpr double kRankTolerance = 1e-12;

double hermite_eval(int n, double x);
double chebyshev_eval(int n, double x);
double basis_eval(Basis b, int n, double x);

// Monomial coefficients of the degree-n basis polynomial, index = power.
// Exact integers for the degrees the cumulant oracle uses.
std::vector<double> monomial_coefficients(Basis b, int n);

// ||basis_n||^2 under the basis weight: n! for Hermite, 1 for Chebyshev.
double basis_norm_squared(Basis b, int n);

// Orthogonal-expansion coefficients c_1..c_K of a functional (c_0 is forced
// to zero; the dropped value and the discarded L2 tail mass are kept for
// reporting).
struct FunctionalSeries {
    Basis basis = Basis::Hermite;
    std::vector<double> coeffs;  // c_0..c_K with c_0 == 0
    double dropped_c0 = 0.0;
    double tail_mass = 0.0;
    double zero_tol = kRankTolerance;

    FunctionalSeries() = default;
    FunctionalSeries(Basis b, std::vector<double> c, double tol = kRankTolerance);

    int max_degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double eval(double x) const;  // sum_k c_k basis_k(x)

    // Pure basis element c_k = 1 (e.g. pure(Chebyshev, 2) is U_2).
    static FunctionalSeries pure(Basis b, int k);
};

// Smallest k >= 1 with |c_k| above the series tolerance; throws
// hypothesis_error when every coefficient is negligible.
int rank(const FunctionalSeries& s);

// Quadrature nodes/weights normalized so sum(w) = total weight mass = 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_hermite_rule(int order);    // Golub-Welsch, weight N(0,1)
QuadratureRule chebyshev_gauss_rule(int order);  // closed form on [-2,2]
QuadratureRule quadrature_rule(Basis b, int order);

// Projects f onto basis_0..basis_max_deg by Gaussian quadrature; requires
// quad_order >= 2*max_deg + 1 so the Gram products are exact for polynomials.
FunctionalSeries expand(const std::function<double(double)>& f, Basis basis, int max_deg,
                        int quad_order);

}  // namespace freeclt::orthopoly
