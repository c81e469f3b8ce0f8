#include "engset/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "engset/error.hpp"
#include "engset/signed_log.hpp"

namespace engset {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Kronrod abscissae/weights (15 points) and the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    double l1;

    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::fabs(resk);
    std::array<double, 7> fv1{};
    std::array<double, 7> fv2{};
    for (int j = 0; j < 3; ++j) {
        int jtw = 2 * j + 1;
        double dx = half * kXgk[jtw];
        double f1 = f(centre - dx);
        double f2 = f(centre + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::fabs(f1) + std::fabs(f2));
    }
    for (int j = 0; j < 4; ++j) {
        int jtwm1 = 2 * j;
        double dx = half * kXgk[jtwm1];
        double f1 = f(centre - dx);
        double f2 = f(centre + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
    }
    const double dhalf = std::fabs(half);
    resasc *= dhalf;
    resabs *= dhalf;
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::fmin(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::fmax(50.0 * eps * resabs, err);
    }
    return {a, b, resk * half, err, resabs};
}

std::vector<double> profile_breakpoints(const LogProfile& g)
{
    std::vector<double> pts{0.0, g.upper};
    if (g.peak > 0.0 && g.peak < g.upper) {
        pts.push_back(g.peak);
    }
    for (double k : {1.0, 4.0, 16.0, 64.0}) {
        for (double s : {-1.0, 1.0}) {
            double u = g.peak + s * k * g.width;
            if (u > 0.0 && u < g.upper) {
                pts.push_back(u);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Rough maximum of log g(u) + power*log(u) over (0, upper]; only used to
// rescale before exponentiating, so a sampled maximum is good enough.
double sampled_log_max(const LogProfile& g, double power)
{
    double best = kNegInf;
    auto consider = [&](double u) {
        if (u <= 0.0 || u > g.upper) {
            return;
        }
        double v = g.log_g(u) + (power == 0.0 ? 0.0 : power * std::log(u));
        if (std::isfinite(v)) {
            best = std::fmax(best, v);
        }
    };
    for (double u : profile_breakpoints(g)) {
        consider(u);
    }
    constexpr int kGrid = 64;
    for (int i = 1; i <= kGrid; ++i) {
        consider(g.upper * i / kGrid);
        consider(g.upper * std::pow(10.0, -16.0 * i / kGrid));
    }
    if (power <= 0.0) {
        double v0 = g.log_g(0.0);
        if (std::isfinite(v0)) {
            best = std::fmax(best, v0);
        }
    }
    return std::isfinite(best) ? best : 0.0;
}

[[noreturn]] void throw_unconverged(const char* what, const AdaptiveResult& r, double shift)
{
    throw QuadratureError(what, r.value * std::exp(shift), r.error * std::exp(shift), r.nodes);
}

QuadratureResult positive_result(const AdaptiveResult& r, double shift, QuadratureMethod m)
{
    QuadratureResult out;
    out.sign = r.value > 0 ? 1 : (r.value < 0 ? -1 : 0);
    out.log_value = shift + std::log(std::fabs(r.value));
    out.log_abs_error = shift + std::log(r.error);
    out.node_count = r.nodes;
    out.method = m;
    return out;
}

QuadratureResult singular_direct(const LogProfile& g, double alpha, const QuadratureOptions& opts)
{
    const double shift = sampled_log_max(g, alpha - 1.0);
    auto h = [&](double u) {
        if (u <= 0.0) {
            return alpha == 1.0 ? std::exp(g.log_g(0.0) - shift) : 0.0;
        }
        return std::exp(g.log_g(u) + (alpha - 1.0) * std::log(u) - shift);
    };
    auto bps = profile_breakpoints(g);
    auto r = integrate_adaptive(h, bps, opts);
    if (!r.converged) {
        throw_unconverged("kernel integral did not converge (direct)", r, shift);
    }
    return positive_result(r, shift, QuadratureMethod::Direct);
}

QuadratureResult singular_substitution(const LogProfile& g, double alpha,
                                       const QuadratureOptions& opts)
{
    // u = v^{1/alpha}: \int g(u) u^{alpha-1} du = (1/alpha) \int g(v^{1/alpha}) dv
    const double shift = sampled_log_max(g, 0.0);
    const double inv = 1.0 / alpha;
    auto h = [&](double v) {
        double u = v <= 0.0 ? 0.0 : std::exp(std::log(v) * inv);
        return std::exp(g.log_g(std::fmin(u, g.upper)) - shift);
    };
    auto ubps = profile_breakpoints(g);
    std::vector<double> bps;
    for (double u : ubps) {
        bps.push_back(u <= 0.0 ? 0.0 : std::pow(u, alpha));
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    auto r = integrate_adaptive(h, bps, opts);
    if (!r.converged) {
        throw_unconverged("kernel integral did not converge (substitution)", r, shift - std::log(alpha));
    }
    return positive_result(r, shift - std::log(alpha), QuadratureMethod::PowerSubstitution);
}

QuadratureResult singular_split(const LogProfile& g, double alpha, const QuadratureOptions& opts,
                                bool* cancelled)
{
    const double s = std::fmin(1.0, g.upper);
    const double f0 = g.log_g(0.0);
    require(std::isfinite(f0), "the singularity split needs g(0) > 0");
    const double shift = std::fmax(sampled_log_max(g, 0.0), f0);
    const double e0 = std::exp(f0 - shift);

    const SignedLog lead = SignedLog::from_log(f0 + alpha * std::log(s) - std::log(alpha));

    auto rem = [&](double u) {
        if (u <= 0.0) {
            return 0.0;
        }
        double lg = g.log_g(u);
        double d = lg - f0;
        double diff = std::fabs(d) < 0.5 ? e0 * std::expm1(d) : std::exp(lg - shift) - e0;
        return diff * std::exp((alpha - 1.0) * std::log(u));
    };

    // The remainder only needs to be accurate relative to the leading term.
    QuadratureOptions ropts = opts;
    ropts.abs_floor = std::exp(lead.log_abs - shift) * opts.rel_tol / (g.upper > s ? 2.0 : 1.0);
    std::vector<double> bps;
    for (double u : profile_breakpoints(g)) {
        if (u < s) {
            bps.push_back(u);
        }
    }
    bps.push_back(s);
    AdaptiveResult r = integrate_adaptive(rem, bps, ropts);
    if (!r.converged) {
        throw_unconverged("kernel integral did not converge (split remainder)", r, shift);
    }

    SignedLog total = lead + SignedLog::from_log(shift + std::log(std::fabs(r.value)),
                                                 r.value > 0 ? 1 : (r.value < 0 ? -1 : 0));
    double err = r.error;
    double magnitude_log = log_add_exp(lead.log_abs, shift + std::log(std::fabs(r.value)));
    long nodes = r.nodes;

    if (g.upper > s) {
        auto tail = [&](double u) {
            return std::exp(g.log_g(u) + (alpha - 1.0) * std::log(u) - shift);
        };
        std::vector<double> tb{s};
        for (double u : profile_breakpoints(g)) {
            if (u > s) {
                tb.push_back(u);
            }
        }
        auto t = integrate_adaptive(tail, tb, opts);
        if (!t.converged) {
            throw_unconverged("kernel integral did not converge (tail)", t, shift);
        }
        total = total + SignedLog::from_log(shift + std::log(t.value));
        magnitude_log = log_add_exp(magnitude_log, shift + std::log(t.value));
        err += t.error;
        nodes += t.nodes;
    }

    QuadratureResult out;
    out.log_value = total.log_abs;
    out.sign = total.sign;
    out.log_abs_error = shift + std::log(err);
    out.node_count = nodes;
    out.method = QuadratureMethod::SingularitySplit;
    *cancelled = (magnitude_log - total.log_abs) > std::log(100.0);
    return out;
}

} // namespace

std::string_view to_string(QuadratureMethod m)
{
    switch (m) {
    case QuadratureMethod::Direct: return "direct";
    case QuadratureMethod::PowerSubstitution: return "power_substitution";
    case QuadratureMethod::SingularitySplit: return "singularity_split";
    }
    return "unknown";
}

double QuadratureResult::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_value); }

double QuadratureResult::abs_error_estimate() const { return std::exp(log_abs_error); }

double QuadratureResult::relative_error() const
{
    return sign == 0 ? INFINITY : std::exp(log_abs_error - log_value);
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opts)
{
    require(breakpoints.size() >= 2, "adaptive quadrature needs at least one interval");
    std::priority_queue<Segment> heap;
    AdaptiveResult out;
    double total = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) {
            continue;
        }
        Segment s = gk15(f, breakpoints[i], breakpoints[i + 1]);
        out.nodes += 15;
        total += s.value;
        error += s.error;
        l1 += s.l1;
        heap.push(s);
    }

    auto tolerance = [&] {
        return std::fmax(opts.abs_floor,
                         std::fmax(opts.abs_tol * l1, opts.rel_tol * std::fabs(total)));
    };

    // Segments too short to split further are retired; their error stays in
    // the total.
    std::vector<Segment> retired;
    int since_resum = 0;
    while (!heap.empty() && error > tolerance() && out.nodes + 30 <= opts.max_nodes) {
        Segment worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 1e-15 * std::fmax(std::fabs(worst.a), std::fabs(worst.b))) {
            retired.push_back(worst);
            continue;
        }
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        out.nodes += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);

        if (++since_resum == 64) {
            // Re-accumulate to shed drift from the running updates.
            since_resum = 0;
            auto copy = heap;
            total = error = l1 = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                l1 += copy.top().l1;
                copy.pop();
            }
            for (const auto& s : retired) {
                total += s.value;
                error += s.error;
                l1 += s.l1;
            }
        }
    }

    total = error = l1 = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        l1 += heap.top().l1;
        heap.pop();
    }
    for (const auto& s : retired) {
        total += s.value;
        error += s.error;
        l1 += s.l1;
    }
    out.value = total;
    out.error = error;
    out.l1 = l1;
    out.converged = error <= tolerance();
    return out;
}

LogProfile beta_profile(double a, double b, double r)
{
    require(a >= 0.0 && b >= 0.0 && r > 0.0, "beta profile needs a, b >= 0 and r > 0");
    LogProfile g;
    g.upper = 1.0;
    g.log_g = [a, b, r](double u) {
        double la = a == 0.0 ? 0.0 : a * std::log1p(-u);
        double lb = b == 0.0 ? 0.0 : b * std::log1p(r * u);
        return la + lb;
    };
    const double slope0 = b * r - a;
    if (a + b == 0.0) {
        g.peak = 0.0;
        g.width = 1.0;
    } else if (slope0 <= 0.0) {
        g.peak = 0.0;
        g.width = slope0 == 0.0 ? 1.0 : std::fmin(1.0, 1.0 / -slope0);
    } else if (a == 0.0) {
        g.peak = 1.0;
        g.width = std::fmin(1.0, (1.0 + r) / (b * r));
    } else {
        double u = (b * r - a) / (r * (a + b));
        double curv = a / ((1.0 - u) * (1.0 - u)) + b * r * r / ((1.0 + r * u) * (1.0 + r * u));
        g.peak = u;
        g.width = std::fmin(1.0, 1.0 / std::sqrt(curv));
    }
    return g;
}

LogProfile gauss_profile(double c1, double c2, double upper)
{
    require(c2 > 0.0 && upper > 0.0, "gauss profile needs c2 > 0 and a positive range");
    LogProfile g;
    g.upper = upper;
    g.log_g = [c1, c2](double u) { return c1 * u - c2 * u * u; };
    g.peak = std::fmin(upper, std::fmax(0.0, c1 / (2.0 * c2)));
    g.width = 1.0 / std::sqrt(2.0 * c2);
    return g;
}

QuadratureResult integrate_singular_kernel(const LogProfile& g, double alpha,
                                           const QuadratureOptions& opts)
{
    require(alpha > 0.0 && std::isfinite(alpha), "kernel exponent alpha must be positive");
    constexpr double kSplitBelow = 1e-3;
    if (alpha >= 1.0) {
        return singular_direct(g, alpha, opts);
    }
    if (alpha >= kSplitBelow) {
        return singular_substitution(g, alpha, opts);
    }
    bool cancelled = false;
    auto out = singular_split(g, alpha, opts, &cancelled);
    if (cancelled && alpha >= 1e-9) {
        return singular_substitution(g, alpha, opts);
    }
    if (out.relative_error() > 1e-6) {
        throw QuadratureError("split kernel integral lost precision to cancellation", out.value(),
                              out.abs_error_estimate(), out.node_count);
    }
    return out;
}

QuadratureResult integrate_regular_kernel(const LogProfile& g, double alpha,
                                          const QuadratureOptions& opts)
{
    require(alpha >= 0.0 && std::isfinite(alpha), "kernel exponent alpha must be nonnegative");
    const double shift = sampled_log_max(g, alpha);
    auto h = [&](double u) {
        if (u <= 0.0) {
            return alpha == 0.0 ? std::exp(g.log_g(0.0) - shift) : 0.0;
        }
        return std::exp(g.log_g(u) + alpha * std::log(u) - shift);
    };
    auto bps = profile_breakpoints(g);
    auto r = integrate_adaptive(h, bps, opts);
    if (!r.converged) {
        throw_unconverged("kernel integral did not converge (regular kernel)", r, shift);
    }
    return positive_result(r, shift, QuadratureMethod::Direct);
}

} // namespace engset
