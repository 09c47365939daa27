#include "freeclt/covariance.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace freeclt::covariance {

using orthopoly::Basis;
using orthopoly::FunctionalSeries;

CovarianceModel CovarianceModel::geometric(double a) {
    if (!(a >= 0.0 && a < 1.0))
        throw std::invalid_argument("geometric model: need 0 <= a < 1, got " + std::to_string(a));
    CovarianceModel m;
    m.kind_ = Kind::Geometric;
    m.param_ = a;
    return m;
}

CovarianceModel CovarianceModel::power(double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("power model: need beta > 0, got " + std::to_string(beta));
    CovarianceModel m;
    m.kind_ = Kind::Power;
    m.param_ = beta;
    return m;
}

CovarianceModel CovarianceModel::tabulated(std::vector<double> values) {
    if (values.empty() || values[0] != 1.0)
        throw std::invalid_argument("tabulated model: values must start with r(0) = 1");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("tabulated model: non-finite value");
        if (std::abs(v) > 1.0)
            throw std::invalid_argument("tabulated model: |r(t)| <= 1 violated (value " +
                                        std::to_string(v) + ")");
    }
    CovarianceModel m;
    m.kind_ = Kind::Tabulated;
    m.values_ = std::move(values);
    m.tail_max_.assign(m.values_.size(), 0.0);
    double mx = 0.0;
    for (std::size_t i = m.values_.size(); i-- > 0;) {
        mx = std::max(mx, std::abs(m.values_[i]));
        m.tail_max_[i] = mx;
    }
    return m;
}

double CovarianceModel::r(std::int64_t t) const {
    std::int64_t a = std::abs(t);
    switch (kind_) {
        case Kind::Geometric:
            return a == 0 ? 1.0 : std::pow(param_, static_cast<double>(a));
        case Kind::Power:
            return std::pow(1.0 + static_cast<double>(a), -param_);
        case Kind::Tabulated:
            return a < static_cast<std::int64_t>(values_.size())
                       ? values_[static_cast<std::size_t>(a)]
                       : 0.0;
    }
    return 0.0;
}

double CovarianceModel::abs_tail_max(std::int64_t d) const {
    if (d < 0) d = 0;
    switch (kind_) {
        case Kind::Geometric:
            return d == 0 ? 1.0 : std::pow(param_, static_cast<double>(d));
        case Kind::Power:
            return std::pow(1.0 + static_cast<double>(d), -param_);
        case Kind::Tabulated:
            return d < static_cast<std::int64_t>(tail_max_.size())
                       ? tail_max_[static_cast<std::size_t>(d)]
                       : 0.0;
    }
    return 0.0;
}

std::int64_t CovarianceModel::support() const {
    if (kind_ != Kind::Tabulated) return -1;
    return static_cast<std::int64_t>(values_.size()) - 1;
}

std::string CovarianceModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Geometric:
            os << "geometric:" << param_;
            break;
        case Kind::Power:
            os << "power:" << param_;
            break;
        case Kind::Tabulated:
            os << "tabulated[" << values_.size() << "]";
            break;
    }
    return os.str();
}

namespace {

double term_weight(Basis b, int k) {
    return b == Basis::Hermite ? orthopoly::basis_norm_squared(Basis::Hermite, k) : 1.0;
}

}  // namespace

double functional_covariance(const FunctionalSeries& s, const CovarianceModel& m,
                             std::int64_t t) {
    const double rt = m.r(t);
    double acc = 0.0;
    double rp = 1.0;
    for (int k = 1; k <= s.max_degree(); ++k) {
        rp *= rt;  // rt^k
        const double c = s.coeffs[static_cast<std::size_t>(k)];
        if (c != 0.0) acc += c * c * term_weight(s.basis, k) * rp;
    }
    return acc;
}

std::string world_name(World w) { return w == World::Classical ? "classical" : "free"; }

World world_from_name(const std::string& name) {
    if (name == "classical") return World::Classical;
    if (name == "free") return World::Free;
    throw std::invalid_argument("unknown world: " + name + " (expected classical|free)");
}

SummabilityReport summability_check(const FunctionalSeries& s, const CovarianceModel& m) {
    SummabilityReport rep;
    rep.rank = orthopoly::rank(s);
    std::ostringstream os;
    switch (m.kind()) {
        case CovarianceModel::Kind::Geometric:
            rep.summable = true;
            os << "geometric decay: sum_t a^(k*|t|) converges for every rank (a = " << m.param()
               << ", k* = " << rep.rank << ")";
            break;
        case CovarianceModel::Kind::Power: {
            const double bk = m.param() * rep.rank;
            rep.summable = bk > 1.0;
            os << "power decay: beta*k* = " << bk << (rep.summable ? " > 1" : " <= 1")
               << ", sum_t (1+|t|)^(-beta k*) " << (rep.summable ? "converges" : "diverges");
            break;
        }
        case CovarianceModel::Kind::Tabulated:
            rep.summable = true;
            os << "finite support (" << m.support() << "): the sum is finite";
            break;
    }
    rep.witness = os.str();
    return rep;
}

SigmaSquared sigma_squared(const FunctionalSeries& s, const CovarianceModel& m, World world,
                           double tail_tol) {
    const Basis expected = world == World::Classical ? Basis::Hermite : Basis::Chebyshev;
    if (s.basis != expected)
        throw std::invalid_argument("sigma_squared: series basis does not match world " +
                                    world_name(world));
    SummabilityReport sum = summability_check(s, m);
    if (!sum.summable)
        throw hypothesis_error("sigma_squared: covariance sum diverges (" + sum.witness + ")");

    SigmaSquared out;
    switch (m.kind()) {
        case CovarianceModel::Kind::Geometric: {
            // Per coefficient: sum_{t in Z} a^{k|t|} = (1 + a^k) / (1 - a^k).
            const double a = m.param();
            double acc = 0.0;
            for (int k = 1; k <= s.max_degree(); ++k) {
                const double c = s.coeffs[static_cast<std::size_t>(k)];
                if (c == 0.0) continue;
                const double ak = std::pow(a, k);
                acc += c * c * term_weight(s.basis, k) * (1.0 + ak) / (1.0 - ak);
            }
            out.value = acc;
            out.tail_bound = 0.0;
            break;
        }
        case CovarianceModel::Kind::Tabulated: {
            double acc = functional_covariance(s, m, 0);
            for (std::int64_t t = 1; t <= m.support(); ++t)
                acc += 2.0 * functional_covariance(s, m, t);
            out.value = acc;
            out.tail_bound = 0.0;
            break;
        }
        case CovarianceModel::Kind::Power: {
            // Truncate at T and bound the tail per coefficient by the integral
            // of (1+t)^(-beta k): sum_{t>T} <= (1+T)^(1-beta k)/(beta k - 1).
            const double beta = m.param();
            auto tail_bound_at = [&](std::int64_t T) {
                double b = 0.0;
                for (int k = std::max(1, sum.rank); k <= s.max_degree(); ++k) {
                    const double c = s.coeffs[static_cast<std::size_t>(k)];
                    if (c == 0.0) continue;
                    const double bk = beta * k;
                    b += 2.0 * c * c * term_weight(s.basis, k) *
                         std::pow(1.0 + static_cast<double>(T), 1.0 - bk) / (bk - 1.0);
                }
                return b;
            };
            std::int64_t T = 1024;
            const std::int64_t cap = 1'000'000;
            while (tail_bound_at(T) > tail_tol && T < cap) T *= 2;
            T = std::min(T, cap);
            double acc = functional_covariance(s, m, 0);
            for (std::int64_t t = 1; t <= T; ++t) acc += 2.0 * functional_covariance(s, m, t);
            out.value = acc;
            out.tail_bound = tail_bound_at(T);
            break;
        }
    }
    out.zero_flagged = std::abs(out.value) <= kSigmaZeroTolerance;
    return out;
}

PsdReport psd_check(const CovarianceModel& m, int truncation, int grid) {
    if (truncation < 0 || grid < 1) throw std::invalid_argument("psd_check: bad arguments");
    if (m.kind() == CovarianceModel::Kind::Tabulated &&
        truncation < m.support())
        throw std::invalid_argument("psd_check: truncation below tabulated support");
    PsdReport rep;
    double mn = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid; ++g) {
        const double x = static_cast<double>(g) / grid;
        double f = 1.0;  // r(0)
        for (int t = 1; t <= truncation; ++t)
            f += 2.0 * m.r(t) * std::cos(2.0 * std::numbers::pi * x * t);
        mn = std::min(mn, f);
    }
    rep.min_spectral_value = mn;
    rep.flagged = mn < -1e-8;
    return rep;
}

}  // namespace freeclt::covariance
