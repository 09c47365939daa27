#include "freeclt/orthopoly.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace freeclt::orthopoly {

namespace {

void check_degree(int n) {
    if (n < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
    if (n > kMaxDegree)
        throw cap_error("polynomial degree " + std::to_string(n) + " exceeds cap " +
                        std::to_string(kMaxDegree));
}

}  // namespace

std::string basis_name(Basis b) { return b == Basis::Hermite ? "hermite" : "chebyshev"; }

Basis basis_from_name(const std::string& name) {
    if (name == "hermite" || name == "Hermite" || name == "H") return Basis::Hermite;
    if (name == "chebyshev" || name == "Chebyshev" || name == "U") return Basis::Chebyshev;
    throw std::invalid_argument("unknown basis: " + name);
}

double hermite_eval(int n, double x) {
    check_degree(n);
    if (n == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int k = 1; k < n; ++k) {
        double next = x * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double chebyshev_eval(int n, double x) {
    check_degree(n);
    if (n == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int k = 1; k < n; ++k) {
        double next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double basis_eval(Basis b, int n, double x) {
    return b == Basis::Hermite ? hermite_eval(n, x) : chebyshev_eval(n, x);
}

std::vector<double> monomial_coefficients(Basis b, int n) {
    check_degree(n);
    // p_{k+1} = x p_k - w_k p_{k-1}, with w_k = k (Hermite) or 1 (Chebyshev).
    std::vector<double> prev{1.0};
    if (n == 0) return prev;
    std::vector<double> cur{0.0, 1.0};
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
        for (std::size_t d = 0; d < cur.size(); ++d) next[d + 1] += cur[d];
        double w = b == Basis::Hermite ? static_cast<double>(k) : 1.0;
        for (std::size_t d = 0; d < prev.size(); ++d) next[d] -= w * prev[d];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

double basis_norm_squared(Basis b, int n) {
    check_degree(n);
    if (b == Basis::Chebyshev) return 1.0;
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= static_cast<double>(k);
    return f;
}

FunctionalSeries::FunctionalSeries(Basis b, std::vector<double> c, double tol)
    : basis(b), coeffs(std::move(c)), zero_tol(tol) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    if (coeffs[0] != 0.0)
        throw std::invalid_argument("FunctionalSeries: c_0 must be zero (mean-zero functional)");
    if (max_degree() > kMaxDegree)
        throw cap_error("FunctionalSeries: degree exceeds cap " + std::to_string(kMaxDegree));
    for (double v : coeffs)
        if (!std::isfinite(v)) throw std::invalid_argument("FunctionalSeries: non-finite coefficient");
}

double FunctionalSeries::eval(double x) const {
    double prev = 1.0, cur = x, acc = 0.0;
    if (!coeffs.empty()) acc += coeffs[0];
    if (coeffs.size() > 1) acc += coeffs[1] * x;
    for (int k = 2; k <= max_degree(); ++k) {
        double w = basis == Basis::Hermite ? static_cast<double>(k - 1) : 1.0;
        double next = x * cur - w * prev;
        prev = cur;
        cur = next;
        acc += coeffs[static_cast<std::size_t>(k)] * cur;
    }
    return acc;
}

FunctionalSeries FunctionalSeries::pure(Basis b, int k) {
    if (k < 1) throw std::invalid_argument("pure: degree must be >= 1");
    std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
    c.back() = 1.0;
    return FunctionalSeries(b, std::move(c));
}

int rank(const FunctionalSeries& s) {
    for (int k = 1; k <= s.max_degree(); ++k)
        if (std::abs(s.coeffs[static_cast<std::size_t>(k)]) > s.zero_tol) return k;
    throw hypothesis_error("degenerate functional: all coefficients below tolerance " +
                           std::to_string(s.zero_tol));
}

QuadratureRule gauss_hermite_rule(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be positive");
    // Jacobi matrix of the monic recurrence x p_k = p_{k+1} + k p_{k-1}:
    // zero diagonal, off-diagonal sqrt(k). Nodes are its eigenvalues, weights
    // the squared first components (total mass 1).
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        double off = std::sqrt(static_cast<double>(k));
        jac(k, k - 1) = off;
        jac(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    if (es.info() != Eigen::Success) throw numeric_error("gauss_hermite_rule: eigensolver failed");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    }
    return rule;
}

QuadratureRule chebyshev_gauss_rule(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be positive");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const double h = std::numbers::pi / (order + 1);
    for (int j = 1; j <= order; ++j) {
        double s = std::sin(j * h);
        rule.nodes[static_cast<std::size_t>(j - 1)] = 2.0 * std::cos(j * h);
        rule.weights[static_cast<std::size_t>(j - 1)] = 2.0 / (order + 1) * s * s;
    }
    return rule;
}

QuadratureRule quadrature_rule(Basis b, int order) {
    return b == Basis::Hermite ? gauss_hermite_rule(order) : chebyshev_gauss_rule(order);
}

FunctionalSeries expand(const std::function<double(double)>& f, Basis basis, int max_deg,
                        int quad_order) {
    check_degree(max_deg);
    if (quad_order < 2 * max_deg + 1)
        throw std::invalid_argument("expand: quad_order must be >= 2*max_deg + 1");
    QuadratureRule rule = quadrature_rule(basis, quad_order);

    const std::size_t q = rule.nodes.size();
    std::vector<double> fx(q);
    double norm_f2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        fx[i] = f(rule.nodes[i]);
        if (!std::isfinite(fx[i]))
            throw numeric_error("expand: functional not finite at quadrature node " +
                                std::to_string(rule.nodes[i]));
        norm_f2 += rule.weights[i] * fx[i] * fx[i];
    }

    std::vector<double> coeffs(static_cast<std::size_t>(max_deg) + 1, 0.0);
    double projected = 0.0;
    // basis_n evaluated at all nodes via the three-term recurrence,
    // advancing one degree per outer iteration.
    std::vector<double> pprev(q, 0.0), pcur(q, 1.0), pnext(q);
    for (int n = 0; n <= max_deg; ++n) {
        double inner = 0.0;
        for (std::size_t i = 0; i < q; ++i) inner += rule.weights[i] * fx[i] * pcur[i];
        const double ns = basis_norm_squared(basis, n);
        const double cn = inner / ns;
        coeffs[static_cast<std::size_t>(n)] = cn;
        projected += cn * cn * ns;
        const double w = basis == Basis::Hermite ? static_cast<double>(n) : 1.0;
        for (std::size_t i = 0; i < q; ++i)
            pnext[i] = rule.nodes[i] * pcur[i] - (n == 0 ? 0.0 : w) * pprev[i];
        pprev.swap(pcur);
        pcur.swap(pnext);
    }

    FunctionalSeries out;
    out.basis = basis;
    out.dropped_c0 = coeffs[0];
    coeffs[0] = 0.0;
    out.coeffs = std::move(coeffs);
    out.tail_mass = std::max(0.0, norm_f2 - projected);
    return out;
}

}  // namespace freeclt::orthopoly
