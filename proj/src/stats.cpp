#include "stiffbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "stiffbench/error.hpp"

namespace stiffbench::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw InvalidArgument("normal_quantile needs p in [0, 1]");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                    4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                    2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                   1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                   1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                   2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                   7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    return h;  // converged to working precision for every argument we use
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("incomplete_beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete_beta needs x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_sf(double f, double d1, double d2) {
    if (!(d1 > 0.0 && d2 > 0.0)) throw InvalidArgument("F distribution needs positive degrees of freedom");
    if (std::isnan(f)) return kNaN;
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

namespace {

void check_binomial(long n, long k, double p) {
    if (n < 0) throw InvalidArgument("binomial n must be non-negative");
    if (k < 0 || k > n) throw InvalidArgument("binomial k must lie in [0, n]");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binomial p must lie in [0, 1]");
}

// Sum of pmf over [lo, hi], each term formed in log space.
double binom_range(long n, long lo, long hi, double p) {
    if (lo > hi) return 0.0;
    if (p == 0.0) return lo == 0 ? 1.0 : 0.0;
    if (p == 1.0) return hi == n ? 1.0 : 0.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lnf = std::lgamma(static_cast<double>(n) + 1.0);
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(hi - lo + 1));
    double peak = -std::numeric_limits<double>::infinity();
    for (long j = lo; j <= hi; ++j) {
        const double jj = static_cast<double>(j);
        const double l = lnf - std::lgamma(jj + 1.0) - std::lgamma(static_cast<double>(n - j) + 1.0) + jj * lp +
                         static_cast<double>(n - j) * lq;
        logs.push_back(l);
        peak = std::max(peak, l);
    }
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - peak);
    return std::min(1.0, sum * std::exp(peak));
}

}  // namespace

double binom_tail(long n, long k, double p) {
    check_binomial(n, k, p);
    if (k == 0) return 1.0;
    return binom_range(n, k, n, p);
}

double binom_cdf(long n, long k, double p) {
    check_binomial(n, k, p);
    if (k == n) return 1.0;
    return binom_range(n, 0, k, p);
}

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("summary of an empty sample");
    Summary s;
    s.n = values.size();
    const double n = static_cast<double>(s.n);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / n;
    s.sd = std::sqrt(s.variance);
    return s;
}

// ---------------------------------------------------------------------------
// ANOVA

const AnovaRow& AnovaTable::row(const std::string& source) const {
    for (const auto& r : rows)
        if (r.source == source) return r;
    throw InvalidArgument("no ANOVA source '" + source + "'");
}

double AnovaTable::total_ss() const {
    double t = 0.0;
    for (const auto& r : rows) t += r.ss;
    return t;
}

namespace {

// Level codes of one factor remapped to 0..L-1 in sorted order.
std::vector<std::size_t> dense_codes(const std::vector<int>& raw, std::size_t& n_levels) {
    std::map<int, std::size_t> index;
    for (int v : raw) index.emplace(v, 0);
    std::size_t i = 0;
    for (auto& [_, idx] : index) idx = i++;
    n_levels = index.size();
    std::vector<std::size_t> out;
    out.reserve(raw.size());
    for (int v : raw) out.push_back(index.at(v));
    return out;
}

}  // namespace

AnovaTable anova(const std::vector<Factor>& factors, std::span<const double> y) {
    if (factors.empty()) throw InvalidArgument("ANOVA needs at least one factor");
    const std::size_t n = y.size();
    if (n < 2) throw InvalidArgument("ANOVA needs at least two observations");
    const std::size_t k = factors.size();

    std::vector<std::vector<std::size_t>> codes(k);
    std::vector<std::size_t> n_levels(k);
    for (std::size_t f = 0; f < k; ++f) {
        if (factors[f].levels.size() != n) throw InvalidArgument("factor '" + factors[f].name + "' length mismatch");
        codes[f] = dense_codes(factors[f].levels, n_levels[f]);
        if (n_levels[f] < 2) throw InvalidArgument("factor '" + factors[f].name + "' has a single level");
    }

    // Balance: every full-factorial cell holds the same number of observations.
    std::size_t cells = 1;
    for (std::size_t L : n_levels) cells *= L;
    std::vector<std::size_t> cell_count(cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t f = 0; f < k; ++f) c = c * n_levels[f] + codes[f][i];
        ++cell_count[c];
    }
    const std::size_t per_cell = cell_count.front();
    if (per_cell == 0 || std::any_of(cell_count.begin(), cell_count.end(), [&](std::size_t c) { return c != per_cell; }))
        throw UnbalancedDesign("ANOVA requires every factor-level combination to occur equally often");

    const double grand = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double total = 0.0;
    for (double v : y) total += (v - grand) * (v - grand);

    std::vector<std::vector<double>> main_means(k);
    AnovaTable table;
    double model_ss = 0.0;
    double model_df = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<double> sum(n_levels[f], 0.0);
        std::vector<double> cnt(n_levels[f], 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[codes[f][i]] += y[i];
            cnt[codes[f][i]] += 1.0;
        }
        double ss = 0.0;
        main_means[f].resize(n_levels[f]);
        for (std::size_t l = 0; l < n_levels[f]; ++l) {
            main_means[f][l] = sum[l] / cnt[l];
            ss += cnt[l] * (main_means[f][l] - grand) * (main_means[f][l] - grand);
        }
        AnovaRow r;
        r.source = factors[f].name;
        r.ss = ss;
        r.df = static_cast<double>(n_levels[f] - 1);
        table.rows.push_back(r);
        model_ss += ss;
        model_df += r.df;
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const std::size_t la = n_levels[a], lb = n_levels[b];
            std::vector<double> sum(la * lb, 0.0), cnt(la * lb, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t c = codes[a][i] * lb + codes[b][i];
                sum[c] += y[i];
                cnt[c] += 1.0;
            }
            double ss = 0.0;
            for (std::size_t i = 0; i < la; ++i) {
                for (std::size_t j = 0; j < lb; ++j) {
                    const std::size_t c = i * lb + j;
                    const double e = sum[c] / cnt[c] - main_means[a][i] - main_means[b][j] + grand;
                    ss += cnt[c] * e * e;
                }
            }
            AnovaRow r;
            r.source = factors[a].name + ":" + factors[b].name;
            r.ss = ss;
            r.df = static_cast<double>((la - 1) * (lb - 1));
            table.rows.push_back(r);
            model_ss += ss;
            model_df += r.df;
        }
    }

    AnovaRow resid;
    resid.source = "Residual";
    resid.df = static_cast<double>(n - 1) - model_df;
    resid.ss = total - model_ss;
    // Round-off can leave a residual of a few ulps when the model is saturated.
    if (resid.ss < 1e-12 * std::max(total, 1.0)) resid.ss = 0.0;
    if (resid.df < 0.0) throw UnbalancedDesign("model has more terms than observations");
    resid.ms = resid.df > 0.0 ? resid.ss / resid.df : kNaN;
    resid.f = kNaN;
    resid.p = kNaN;

    for (auto& r : table.rows) {
        r.ms = r.ss / r.df;
        if (resid.df > 0.0 && resid.ss > 0.0) {
            r.f = r.ms / resid.ms;
            r.p = f_sf(r.f, r.df, resid.df);
        } else {
            r.f = kNaN;
            r.p = kNaN;
        }
    }
    table.rows.push_back(resid);
    return table;
}

// ---------------------------------------------------------------------------
// Mann-Whitney U

namespace {

// Midranks (1-based) of the pooled sample, doubled so they are integers.
std::vector<long> doubled_midranks(std::span<const double> pooled, bool& ties) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<long> r2(n);
    ties = false;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        if (j > i) ties = true;
        const long twice = static_cast<long>(i + 1 + j + 1);  // 2 * average of ranks i+1..j+1
        for (std::size_t t = i; t <= j; ++t) r2[order[t]] = twice;
        i = j + 1;
    }
    return r2;
}

}  // namespace

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw InvalidArgument("Mann-Whitney U needs two non-empty samples");
    const std::size_t n1 = x.size(), n2 = y.size(), n = n1 + n2;
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    for (double v : pooled)
        if (!std::isfinite(v)) throw InvalidArgument("Mann-Whitney U needs finite values");

    TestResult res;
    res.n1 = n1;
    res.n2 = n2;
    bool ties = false;
    const auto r2 = doubled_midranks(pooled, ties);
    long r2x = 0;
    for (std::size_t i = 0; i < n1; ++i) r2x += r2[i];
    const double nn1 = static_cast<double>(n1), nn2 = static_cast<double>(n2);
    res.statistic = static_cast<double>(r2x) / 2.0 - nn1 * (nn1 + 1.0) / 2.0;
    res.tie_correction = ties;

    if (n <= kMannWhitneyExactLimit) {
        // counts[j][s]: subsets of size j with doubled rank sum s.
        const long max_sum = std::accumulate(r2.begin(), r2.end(), 0L);
        std::vector<std::vector<double>> counts(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
        counts[0][0] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = std::min(i + 1, n1); j >= 1; --j) {
                for (long s = max_sum; s >= r2[i]; --s)
                    counts[j][static_cast<std::size_t>(s)] += counts[j - 1][static_cast<std::size_t>(s - r2[i])];
            }
        }
        double total = 0.0, lower = 0.0, upper = 0.0;
        for (long s = 0; s <= max_sum; ++s) {
            const double c = counts[n1][static_cast<std::size_t>(s)];
            total += c;
            if (s <= r2x) lower += c;
            if (s >= r2x) upper += c;
        }
        res.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
        res.exact = true;
        return res;
    }

    // Normal approximation with tie and continuity corrections.
    const double nt = static_cast<double>(n);
    std::vector<long> sorted = r2;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mu = nn1 * nn2 / 2.0;
    const double var = nn1 * nn2 / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    if (!(var > 0.0)) {
        res.p_value = 1.0;
        return res;
    }
    const double z = (std::abs(res.statistic - mu) - 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, 2.0 * normal_sf(z));
    return res;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk

namespace {

// c[0] + c[1] x + c[2] x^2 + ...
double poly(std::span<const double> c, double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

}  // namespace

TestResult shapiro_wilk(std::span<const double> data) {
    const std::size_t n = data.size();
    if (n < 3 || n > 5000) throw InvalidArgument("Shapiro-Wilk needs 3 <= n <= 5000");
    std::vector<double> x(data.begin(), data.end());
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidArgument("Shapiro-Wilk needs finite values");
    std::sort(x.begin(), x.end());
    if (x.back() - x.front() <= 1e-19 * std::max(1.0, std::abs(x.front())))
        throw DegenerateSample("Shapiro-Wilk on a constant sample");

    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
    static constexpr double g[] = {-2.273, 0.459};

    const double an = static_cast<double>(n);
    const std::size_t half = n / 2;
    std::vector<double> a(half + 1, 0.0);  // 1-based
    if (n == 3) {
        a[1] = std::sqrt(0.5);
    } else {
        std::vector<double> m(half + 1);
        double summ2 = 0.0;
        for (std::size_t i = 1; i <= half; ++i) {
            m[i] = normal_quantile((static_cast<double>(i) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - m[1] / ssumm2;
        std::size_t first = 2;
        double fac;
        if (n > 5) {
            first = 3;
            const double a2 = -m[2] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1] - 2.0 * m[2] * m[2]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[2] = a2;
        } else {
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1));
        }
        a[1] = a1;
        for (std::size_t i = first; i <= half; ++i) a[i] = -m[i] / fac;
    }

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / an;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    double b = 0.0;
    for (std::size_t i = 1; i <= half; ++i) b += a[i] * (x[n - i] - x[i - 1]);
    double w = std::min(1.0, b * b / ss);

    TestResult res;
    res.statistic = w;
    res.n1 = n;
    if (n == 3) {
        constexpr double pi6 = 1.90985931710274;   // 6 / pi
        constexpr double stqr = 1.04719755119660;  // pi / 3
        res.p_value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
        return res;
    }
    const double w1 = std::log1p(-w);
    double y, mu, sigma;
    if (n <= 11) {
        const double gamma = poly(g, an);
        if (w1 >= gamma) {
            res.p_value = 1e-99;
            return res;
        }
        y = -std::log(gamma - w1);
        mu = poly(c3, an);
        sigma = std::exp(poly(c4, an));
    } else {
        const double ln = std::log(an);
        y = w1;
        mu = poly(c5, ln);
        sigma = std::exp(poly(c6, ln));
    }
    res.p_value = std::clamp(normal_sf((y - mu) / sigma), 0.0, 1.0);
    return res;
}

// ---------------------------------------------------------------------------
// Levene

TestResult levene(const std::vector<std::vector<double>>& groups, LeveneCenter center) {
    if (groups.size() < 2) throw InvalidArgument("Levene's test needs at least two groups");
    std::vector<std::vector<double>> z(groups.size());
    std::size_t total_n = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& grp = groups[g];
        if (grp.size() < 2) throw InvalidArgument("Levene's test needs at least two points per group");
        double c;
        if (center == LeveneCenter::Mean) {
            c = std::accumulate(grp.begin(), grp.end(), 0.0) / static_cast<double>(grp.size());
        } else {
            std::vector<double> s(grp);
            std::sort(s.begin(), s.end());
            const std::size_t h = s.size() / 2;
            c = s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
        }
        for (double v : grp) z[g].push_back(std::abs(v - c));
        total_n += grp.size();
    }
    const double k = static_cast<double>(groups.size());
    const double n = static_cast<double>(total_n);
    double zbar = 0.0;
    for (const auto& zg : z) zbar += std::accumulate(zg.begin(), zg.end(), 0.0);
    zbar /= n;
    double between = 0.0, within = 0.0;
    for (const auto& zg : z) {
        const double mi = std::accumulate(zg.begin(), zg.end(), 0.0) / static_cast<double>(zg.size());
        between += static_cast<double>(zg.size()) * (mi - zbar) * (mi - zbar);
        for (double v : zg) within += (v - mi) * (v - mi);
    }
    if (!(within > 0.0)) throw DegenerateSample("Levene's test: no spread of deviations within any group");

    TestResult res;
    res.n1 = total_n;
    res.n2 = groups.size();
    res.statistic = (n - k) / (k - 1.0) * between / within;
    res.p_value = std::clamp(f_sf(res.statistic, k - 1.0, n - k), 0.0, 1.0);
    return res;
}

}  // namespace stiffbench::stats
