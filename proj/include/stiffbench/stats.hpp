#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stiffbench::stats {

// ---------------------------------------------------------------------------
// Distributions

double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate far into the tail.
double normal_sf(double x);
/// Inverse of normal_cdf (Wichura's AS 241, about 1e-16 relative).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);

/// P(F > f) for an F(d1, d2) variable.
double f_sf(double f, double d1, double d2);

/// P(X >= k) for X ~ Binomial(n, p), summed exactly term by term in log space.
double binom_tail(long n, long k, double p);
/// P(X <= k).
double binom_cdf(long n, long k, double p);

// ---------------------------------------------------------------------------
// Descriptive

/// Population-style summary (variance divides by n).
struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double sd = 0.0;
};

Summary summarize(std::span<const double> values);

// ---------------------------------------------------------------------------
// ANOVA

/// One categorical factor: a name and a level code per observation.
struct Factor {
    std::string name;
    std::vector<int> levels;
};

struct AnovaRow {
    std::string source;
    double ss = 0.0;
    double df = 0.0;
    double ms = 0.0;
    double f = 0.0;  ///< NaN when not applicable (residual row, or no residual variance / df)
    double p = 0.0;  ///< NaN alongside f
};

struct AnovaTable {
    std::vector<AnovaRow> rows;  ///< main effects, pairwise interactions, then "Residual"

    [[nodiscard]] const AnovaRow& row(const std::string& source) const;
    [[nodiscard]] double total_ss() const;
};

/// Balanced factorial ANOVA with every main effect and every pairwise
/// interaction; higher-order terms pool into the residual.
///
/// Every combination of factor levels must occur equally often, otherwise
/// UnbalancedDesign is thrown.
AnovaTable anova(const std::vector<Factor>& factors, std::span<const double> response);

// ---------------------------------------------------------------------------
// Tests

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    bool tie_correction = false;
    bool exact = false;
};

/// Two-sided Mann-Whitney U. The statistic is U of x (counts pairs with
/// x > y, ties as one half). Exact permutation distribution of the midrank
/// sum when n1 + n2 <= 12, otherwise the normal approximation with tie and
/// continuity corrections.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y);

inline constexpr std::size_t kMannWhitneyExactLimit = 12;

/// Shapiro-Wilk W with Royston's (1995, AS R94) coefficients and p-value.
/// Requires 3 <= n <= 5000; throws DegenerateSample on a constant sample.
TestResult shapiro_wilk(std::span<const double> x);

enum class LeveneCenter { Mean, Median };

/// Levene's test on absolute deviations from each group's center; Median
/// gives the Brown-Forsythe variant.
TestResult levene(const std::vector<std::vector<double>>& groups, LeveneCenter center = LeveneCenter::Mean);

}  // namespace stiffbench::stats
