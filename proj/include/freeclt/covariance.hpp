#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freeclt/common.hpp"
#include "freeclt/orthopoly.hpp"

namespace freeclt::covariance {

// Stationary covariance r(t) (written rho(t) on the semicircular side) with
// r(0) = 1, r(t) = r(-t), |r(t)| <= 1 and r(t) -> 0.
class CovarianceModel {
  public:
    enum class Kind { Geometric, Power, Tabulated };

    static CovarianceModel geometric(double a);
    static CovarianceModel power(double beta);
    static CovarianceModel tabulated(std::vector<double> values);  // values[0] must be 1

    Kind kind() const { return kind_; }
    double param() const { return param_; }
    const std::vector<double>& values() const { return values_; }

    double r(std::int64_t t) const;

    // Monotone envelope: max_{|u| >= d} |r(u)|. Used to bound truncated sums.
    double abs_tail_max(std::int64_t d) const;

    // Support bound: r(t) == 0 for |t| > support (tabulated only; -1 = infinite).
    std::int64_t support() const;

    std::string describe() const;

  private:
    CovarianceModel() = default;
    Kind kind_ = Kind::Geometric;
    double param_ = 0.0;
    std::vector<double> values_;
    std::vector<double> tail_max_;  // tabulated: suffix maxima of |values|
};

// r_H(t) = sum c_k^2 k! r(t)^k (Hermite) or rho_U(t) = sum c_k^2 rho(t)^k
// (Chebyshev), over the finite coefficient list.
double functional_covariance(const orthopoly::FunctionalSeries& s, const CovarianceModel& m,
                             std::int64_t t);

enum class World { Classical, Free };
std::string world_name(World w);
World world_from_name(const std::string& name);

struct SummabilityReport {
    bool summable = false;
    int rank = 0;
    std::string witness;
};

// Decides sum_t |r(t)|^{k*} < infinity analytically per model kind.
SummabilityReport summability_check(const orthopoly::FunctionalSeries& s,
                                    const CovarianceModel& m);

struct SigmaSquared {
    double value = 0.0;
    double tail_bound = 0.0;  // bound on the truncated mass (0 when analytic)
    bool zero_flagged = false;  // |value| below the CLT-hypothesis tolerance
};

inline constexpr double kSigmaZeroTolerance = 1e-10;

// sigma^2 = sum_{t in Z} functional_covariance(s, m, t). Analytic per
// coefficient for geometric decay, finite for tabulated support, truncated
// with a certified tail bound otherwise. Throws hypothesis_error when the
// rank condition makes the sum divergent.
SigmaSquared sigma_squared(const orthopoly::FunctionalSeries& s, const CovarianceModel& m,
                           World world, double tail_tol = 1e-10);

struct PsdReport {
    double min_spectral_value = 0.0;
    bool flagged = false;  // min below -1e-8
};

// Evaluates the truncated spectral density sum_{|t|<=T} r(t) e^{2 pi i x t}
// on a uniform grid and reports its minimum.
PsdReport psd_check(const CovarianceModel& m, int truncation, int grid);

}  // namespace freeclt::covariance
