#include "tailex/heavy_tail.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tailex/errors.hpp"

namespace tailex {

void ParetoLaw::validate() const {
    if (!(tail_index > 0.0) || !std::isfinite(tail_index))
        throw std::domain_error("ParetoLaw: tail_index must be positive, got " +
                                std::to_string(tail_index));
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::domain_error("ParetoLaw: scale must be positive, got " + std::to_string(scale));
}

double pareto_survival(double x, const ParetoLaw& law) {
    law.validate();
    if (x <= law.scale) return 1.0;
    return std::pow(x / law.scale, -law.tail_index);
}

double pareto_quantile(double p, const ParetoLaw& law) {
    law.validate();
    if (!(p >= 0.0) || p >= 1.0)
        throw std::domain_error("pareto_quantile: p must lie in [0, 1), got " + std::to_string(p));
    if (p == 0.0) return law.scale;
    return law.scale * std::pow(1.0 - p, -1.0 / law.tail_index);
}

double threshold_u(std::size_t n, const ThresholdSequence& ts) {
    if (n < 1) throw std::domain_error("threshold_u: n must be >= 1");
    if (!(ts.y > 0.0)) throw std::domain_error("threshold_u: y must be positive");
    if (!(ts.k1 > 0.0)) throw std::domain_error("threshold_u: k1 must be positive");
    return ts.y * std::pow(static_cast<double>(n), 1.0 / ts.k1);
}

std::size_t TailProfile::dominating_count() const {
    std::size_t d = 0;
    for (const auto& col : per_column) {
        if (col.tail_index == k1)
            ++d;
        else
            break;  // dominating columns come first
    }
    return d;
}

void TailProfile::validate() const {
    if (!(k1 > 0.0)) throw ConfigError("TailProfile: k1 must be positive");
    if (per_column.empty()) throw ConfigError("TailProfile: no columns");
    if (per_column.front().tail_index != k1)
        throw ConfigError("TailProfile: first column must carry the minimum tail index k1");
    for (const auto& col : per_column) {
        if (col.tail_index < k1)
            throw ConfigError("TailProfile: column tail index below k1");
        if (!(col.theta >= 0.0) || !(col.theta <= 1.0))
            throw ConfigError("TailProfile: extremal index outside [0, 1]");
    }
    const std::size_t d = dominating_count();
    for (std::size_t i = d; i < per_column.size(); ++i) {
        if (per_column[i].tail_index < k)
            throw ConfigError("TailProfile: non-dominating column below the limiting index k");
    }
}

TailProfile TailProfile::uniform(double k1, double k, const std::vector<double>& dominating_thetas,
                                 std::size_t total_columns, double nondominating_theta) {
    if (dominating_thetas.empty()) throw ConfigError("TailProfile::uniform: need >= 1 dominating column");
    if (total_columns < dominating_thetas.size())
        throw ConfigError("TailProfile::uniform: total_columns smaller than dominating count");
    TailProfile profile;
    profile.k1 = k1;
    profile.k = k;
    profile.per_column.reserve(total_columns);
    for (double theta : dominating_thetas) profile.per_column.push_back({k1, theta});
    for (std::size_t i = dominating_thetas.size(); i < total_columns; ++i)
        profile.per_column.push_back({k, nondominating_theta});
    profile.validate();
    return profile;
}

double chi_upper_bound(double k1, double k) {
    if (!(k1 > 0.0) || !(k > k1))
        throw std::domain_error("chi_upper_bound: need 0 < k1 < k, got k1=" + std::to_string(k1) +
                                " k=" + std::to_string(k));
    return (k - k1) / (k1 * (k + 1.0));
}

std::size_t row_cap(std::size_t n, double chi) {
    if (n < 1) throw std::domain_error("row_cap: n must be >= 1");
    if (!(chi > 0.0) || !std::isfinite(chi))
        throw ConfigError("row_cap: chi must be positive and finite");
    // The 1e-9 nudge keeps exact integer powers (e.g. 100000^0.2) from
    // rounding down when libm lands a hair below the true value.
    const double cap = std::floor(std::pow(static_cast<double>(n), chi) + 1e-9);
    return cap < 1.0 ? std::size_t{1} : static_cast<std::size_t>(cap);
}

std::size_t row_cap(std::size_t n, double chi, double chi0) {
    if (!(chi > 0.0) || !(chi < chi0))
        throw ConfigError("row_cap: chi must lie in (0, chi0), got chi=" + std::to_string(chi) +
                          " chi0=" + std::to_string(chi0));
    return row_cap(n, chi);
}

double theoretical_exceedance(double z1, double y, double k1, std::size_t n) {
    if (!(z1 > 0.0) || !(y > 0.0) || !(k1 > 0.0) || n < 1)
        throw std::domain_error("theoretical_exceedance: all arguments must be positive");
    return std::pow(z1 / y, k1) / static_cast<double>(n);
}

}  // namespace tailex
