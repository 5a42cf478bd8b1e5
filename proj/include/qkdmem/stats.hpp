#pragma once

#include <cstdint>
#include <vector>

namespace qkdmem::stats {

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
double gamma_q(double a, double x);

/// Survival function of the chi-squared distribution with df degrees of
/// freedom: P(X >= x).
double chi2_sf(double x, double df);

struct Chi2Result {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

/// Two-sample chi-squared homogeneity test over aligned count vectors.
/// Cells where both samples are empty are dropped from the statistic.
Chi2Result chi2_two_sample(const std::vector<std::uint64_t>& counts_a,
                           const std::vector<std::uint64_t>& counts_b);

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for a binomial proportion at the given z quantile
/// (z = 2.5758 for a 99% interval).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

inline constexpr double kWilson99Z = 2.5758293035489004;

}  // namespace qkdmem::stats
