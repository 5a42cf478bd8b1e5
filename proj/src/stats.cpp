#include "qkdmem/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdmem::stats {

namespace {

// Series expansion for the regularized lower incomplete gamma P(a, x),
// accurate for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), accurate for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

Chi2Result chi2_two_sample(const std::vector<std::uint64_t>& counts_a,
                           const std::vector<std::uint64_t>& counts_b) {
    if (counts_a.size() != counts_b.size())
        throw std::invalid_argument("chi2_two_sample: size mismatch");
    double na = 0.0, nb = 0.0;
    for (auto c : counts_a) na += static_cast<double>(c);
    for (auto c : counts_b) nb += static_cast<double>(c);
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi2_two_sample: empty sample");

    // Standard homogeneity statistic: sum over cells of
    // (sqrt(nb/na)*O_a - sqrt(na/nb)*O_b)^2 / (O_a + O_b).
    double k1 = std::sqrt(nb / na);
    double k2 = std::sqrt(na / nb);
    double stat = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        double oa = static_cast<double>(counts_a[i]);
        double ob = static_cast<double>(counts_b[i]);
        if (oa + ob == 0.0) continue;
        double d = k1 * oa - k2 * ob;
        stat += d * d / (oa + ob);
        ++used;
    }
    Chi2Result r;
    r.statistic = stat;
    r.df = used > 1 ? static_cast<double>(used - 1) : 1.0;
    r.p_value = chi2_sf(stat, r.df);
    return r;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {center - half, center + half};
}

}  // namespace qkdmem::stats
