#pragma once

// Independent reference implementations used only by the tests.

#include "fluctrack/assignment.hpp"
#include "fluctrack/models.hpp"
#include "fluctrack/rfs_core.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Every legal mapping (distinct measurements, own miss/death), sorted by cost then mapping.
inline std::vector<fluctrack::Assignment> enumerate_assignments(const fluctrack::CostMatrix& costs) {
    const int n = costs.tracks();
    const int m = costs.measurements();
    std::vector<fluctrack::Assignment> out;
    std::vector<int> mapping(n);
    std::vector<char> taken(m, 0);
    std::function<void(int, double)> rec = [&](int i, double cost) {
        if (i == n) {
            if (std::isfinite(cost)) {
                out.push_back({mapping, cost});
            }
            return;
        }
        mapping[i] = fluctrack::kMiss;
        rec(i + 1, cost + costs.miss(i));
        mapping[i] = fluctrack::kDeath;
        rec(i + 1, cost + costs.death(i));
        for (int j = 0; j < m; ++j) {
            if (!taken[j]) {
                taken[j] = 1;
                mapping[i] = j;
                rec(i + 1, cost + costs.detection(i, j));
                taken[j] = 0;
            }
        }
    };
    rec(0, 0.0);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.total_cost != b.total_cost ? a.total_cost < b.total_cost : a.mapping < b.mapping;
    });
    return out;
}

// Minimum over all injective row -> column maps, by recursion.
inline double brute_force_min_cost(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<char> used(a.cols(), 0);
    double best = kInf;
    std::function<void(int, double)> rec = [&](int i, double cost) {
        if (i == n) {
            best = std::min(best, cost);
            return;
        }
        for (int j = 0; j < a.cols(); ++j) {
            if (!used[j]) {
                used[j] = 1;
                rec(i + 1, cost + a(i, j));
                used[j] = 0;
            }
        }
    };
    rec(0, 0.0);
    return best;
}

// One-step ARG prediction of a Gamma(alpha, rate beta) prior: the Poisson count mixed over
// the prior is negative binomial, so the predictive density is
//   sum_i NB(i; alpha, q) Gamma(d; delta + i, scale c),  q = beta / (beta + rho / c).
inline double arg_predictive_pdf(double d, const fluctrack::GammaDensity& prior, const fluctrack::ArgParams& p) {
    if (d <= 0.0) {
        return 0.0;
    }
    const double lambda = p.rho / p.c;
    const double q = prior.rate / (prior.rate + lambda);
    double total = 0.0;
    const double log_q = std::log(q);
    const double log_1mq = std::log1p(-q);
    for (int i = 0; i < 100000; ++i) {
        const double log_nb = std::lgamma(prior.shape + i) - std::lgamma(prior.shape) - std::lgamma(i + 1.0) +
                              prior.shape * log_q + i * log_1mq;
        const double shape = p.delta + i;
        const double log_g = (shape - 1.0) * std::log(d) - d / p.c - std::lgamma(shape) - shape * std::log(p.c);
        const double term = std::exp(log_nb + log_g);
        total += term;
        const double mean_count = prior.shape * (1.0 - q) / q;
        if (i > 10 && i > 3.0 * mean_count + 50 && term < 1e-18 * total) {
            break;
        }
    }
    return total;
}

// KL(p || q) for densities on (0, inf) by adaptive quadrature; q is passed as a log density.
inline double kl_divergence(const std::function<double(double)>& p, const std::function<double(double)>& log_q) {
    const auto integrand = [&](double d) {
        const double pd = p(d);
        if (!(pd > 0.0)) {
            return 0.0;
        }
        return pd * (std::log(pd) - log_q(d));
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(integrand, 0.0, kInf);
}

inline double integrate(const std::function<double(double)>& f, double a, double b) {
    if (std::isinf(b)) {
        boost::math::quadrature::exp_sinh<double> integrator;
        return integrator.integrate(f, a, b);
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b);
}

inline double integrate_gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

// One-sample Kolmogorov-Smirnov statistic sqrt(n) D_n against a continuous CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return std::sqrt(n) * d;
}

// Asymptotic Kolmogorov p-value P(K > x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
inline double ks_p_value(double x) {
    if (x < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-16) {
            break;
        }
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double gamma_cdf(double d, double shape, double scale) {
    return boost::math::cdf(boost::math::gamma_distribution<double>(shape, scale), d);
}

// Pearson chi-square upper quantile via the Gamma law of the statistic.
inline double chi_square_quantile(double dof, double probability) {
    return 2.0 * boost::math::gamma_p_inv(dof / 2.0, probability);
}

}  // namespace oracle
