#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace xplab::oracle {

Vec Mat::apply(const Vec& x) const
{
    Vec y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            y[i] += a[i * d + j] * x[j];
    }
    return y;
}

double norm_p(double p, const Vec& x)
{
    double s = 0.0;
    for (double v : x)
        s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

double norm_2w(const Vec& w, const Vec& x)
{
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n)
        s += x[n] * x[n] * w[n] * w[n];
    return std::sqrt(s);
}

double xp_norm(double p, const Vec& w, const Vec& x)
{
    return std::max(norm_p(p, x), norm_2w(w, x));
}

double ratio(double p, const Vec& w, const Vec& x)
{
    return norm_2w(w, x) / norm_p(p, x);
}

double omega(double p, const Vec& w, const std::vector<std::size_t>& I)
{
    double s = 0.0;
    for (std::size_t n : I)
        s += std::pow(w[n], 2.0 * p / (p - 2.0));
    return s;
}

Vec rosenthal(double p, const Vec& w, const std::vector<std::size_t>& I)
{
    Vec y(w.size(), 0.0);
    for (std::size_t n : I)
        y[n] = std::pow(w[n], 2.0 / (p - 2.0));
    return y;
}

Mat block_projection_matrix(const Vec& w, const std::vector<DenseBlock>& blocks)
{
    const std::size_t d = w.size();
    Mat P{d, Vec(d * d, 0.0)};
    for (const auto& b : blocks) {
        double mass = 0.0;
        for (std::size_t n : b.E)
            mass += b.z[n] * b.z[n] * w[n] * w[n];
        for (std::size_t i = 0; i < d; ++i) {
            if (b.z[i] == 0.0)
                continue;
            for (std::size_t n : b.E)
                P(i, n) += b.z[i] * b.z[n] * w[n] * w[n] / mass;
        }
    }
    return P;
}

namespace {

using Objective = std::function<double(const Vec&)>;

std::size_t grid_points(std::size_t d)
{
    if (d <= 4)
        return 13;
    if (d == 5)
        return 9;
    return 7;
}

// Coordinatewise 3-point local grid around `x` (coordinate `fixed` held at
// 1), recentered on improvement and halved otherwise.
std::pair<double, Vec> refine(const Objective& f, Vec x, std::size_t fixed, double h)
{
    const std::size_t d = x.size();
    double best = f(x);
    std::size_t combos = 1;
    for (std::size_t k = 0; k + 1 < d; ++k)
        combos *= 3;
    Vec t(d);
    for (int round = 0; round < 400 && h > 1e-10; ++round) {
        Vec arg = x;
        double val = best;
        for (std::size_t c = 0; c < combos; ++c) {
            std::size_t code = c;
            for (std::size_t k = 0; k < d; ++k) {
                if (k == fixed) {
                    t[k] = 1.0;
                    continue;
                }
                const double off = static_cast<double>(code % 3) - 1.0;
                code /= 3;
                t[k] = std::clamp(x[k] + off * h, -1.0, 1.0);
            }
            const double v = f(t);
            if (v > val) {
                val = v;
                arg = t;
            }
        }
        if (val > best) {
            best = val;
            x = arg;
        } else {
            h *= 0.5;
        }
    }
    return {best, x};
}

// Maximum of an even, 0-homogeneous objective over R^d \ {0}.
double cube_grid_max(std::size_t d, const Objective& f)
{
    if (d == 1)
        return f(Vec{1.0});
    const std::size_t m = grid_points(d);
    const double spacing = 2.0 / static_cast<double>(m - 1);
    constexpr std::size_t keep = 8;
    std::vector<std::pair<double, std::pair<std::size_t, Vec>>> top;

    std::size_t combos = 1;
    for (std::size_t k = 0; k + 1 < d; ++k)
        combos *= m;
    Vec x(d);
    for (std::size_t face = 0; face < d; ++face) {
        for (std::size_t c = 0; c < combos; ++c) {
            std::size_t code = c;
            for (std::size_t k = 0; k < d; ++k) {
                if (k == face) {
                    x[k] = 1.0;
                    continue;
                }
                x[k] = -1.0 + spacing * static_cast<double>(code % m);
                code /= m;
            }
            const double v = f(x);
            if (top.size() < keep || v > top.back().first) {
                top.push_back({v, {face, x}});
                std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
                if (top.size() > keep)
                    top.pop_back();
            }
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [v, fx] : top)
        best = std::max(best, refine(f, fx.second, fx.first, spacing).first);
    return best;
}

} // namespace

double grid_opnorm(double p, const Vec& w, const Mat& M, Mode mode)
{
    auto nrm = [&](const Vec& v) { return mode == Mode::XP ? xp_norm(p, w, v) : norm_2w(w, v); };
    return cube_grid_max(M.d, [&](const Vec& x) { return nrm(M.apply(x)) / nrm(x); });
}

double grid_ratio_extremum(double p, const Vec& w, const std::vector<Vec>& B, bool maximize)
{
    const std::size_t k = B.size();
    const std::size_t D = w.size();
    const double sign = maximize ? 1.0 : -1.0;
    const double v = cube_grid_max(k, [&](const Vec& a) {
        Vec y(D, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t n = 0; n < D; ++n)
                y[n] += a[j] * B[j][n];
        }
        return sign * ratio(p, w, y);
    });
    return sign * v;
}

double jacobi_norm_2w(const Vec& w, const Mat& M)
{
    const std::size_t d = M.d;
    Mat B = M;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            B(i, j) = w[i] * M(i, j) / w[j];
    }
    Mat S{d, Vec(d * d, 0.0)};
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k)
                S(i, j) += B(k, i) * B(k, j);
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                total += S(i, j) * S(i, j);
                if (i != j)
                    off += S(i, j) * S(i, j);
            }
        }
        if (off <= 1e-30 * total)
            break;
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                if (S(p, q) == 0.0)
                    continue;
                const double theta = (S(q, q) - S(p, p)) / (2.0 * S(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double skp = S(k, p);
                    const double skq = S(k, q);
                    S(k, p) = c * skp - s * skq;
                    S(k, q) = s * skp + c * skq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double spk = S(p, k);
                    const double sqk = S(q, k);
                    S(p, k) = c * spk - s * sqk;
                    S(q, k) = s * spk + c * sqk;
                }
            }
        }
    }
    double top = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        top = std::max(top, S(i, i));
    return std::sqrt(top);
}

double grid_relative_defect(double p, const Vec& w, const Vec& x, const std::vector<Vec>& Y)
{
    const std::size_t k = Y.size();
    const std::size_t D = w.size();
    const double nx = xp_norm(p, w, x);
    double ymin = std::numeric_limits<double>::infinity();
    for (const auto& y : Y)
        ymin = std::min(ymin, xp_norm(p, w, y));
    const double R = 4.0 * nx / ymin;
    auto f = [&](const Vec& a) {
        Vec r = x;
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t n = 0; n < D; ++n)
                r[n] -= a[j] * Y[j][n];
        }
        return xp_norm(p, w, r);
    };

    constexpr std::size_t m = 21;
    std::size_t combos = 1;
    for (std::size_t j = 0; j < k; ++j)
        combos *= m;
    Vec a(k, 0.0);
    Vec best_a(k, 0.0);
    double best = f(best_a);
    for (std::size_t c = 0; c < combos; ++c) {
        std::size_t code = c;
        for (std::size_t j = 0; j < k; ++j) {
            a[j] = R * (-1.0 + 2.0 * static_cast<double>(code % m) / static_cast<double>(m - 1));
            code /= m;
        }
        const double v = f(a);
        if (v < best) {
            best = v;
            best_a = a;
        }
    }
    double h = 2.0 * R / static_cast<double>(m - 1);
    std::size_t local = 1;
    for (std::size_t j = 0; j < k; ++j)
        local *= 3;
    while (h > 1e-12 * R) {
        Vec arg = best_a;
        double val = best;
        for (std::size_t c = 0; c < local; ++c) {
            std::size_t code = c;
            for (std::size_t j = 0; j < k; ++j) {
                a[j] = best_a[j] + (static_cast<double>(code % 3) - 1.0) * h;
                code /= 3;
            }
            const double v = f(a);
            if (v < val) {
                val = v;
                arg = a;
            }
        }
        if (val < best) {
            best = val;
            best_a = arg;
        } else {
            h *= 0.5;
        }
    }
    return best / nx;
}

int split_constant_violations(double delta, double c, double eps, double normP, double normP2, double p,
                              double eps_prime, double rho, double alpha, double beta)
{
    int bad = 0;
    if (!(delta < 1.0 / normP2))
        ++bad;
    if (!(eps_prime < eps && eps_prime < delta * alpha))
        ++bad;
    if (!(beta < (1.0 - delta * normP2) / normP && beta < eps / c))
        ++bad;
    const double r1 = std::pow(c, -p / (p - 2.0)) * std::pow(delta, 2.0 / (p - 2.0));
    const double r2 = std::pow(beta, p / (p - 2.0));
    if (!(rho <= r1 && rho <= r2))
        ++bad;
    if (!(beta > alpha))
        ++bad;
    const double l1 = beta * delta * normP2 / (1.0 - beta * normP);
    const double l2 = beta * beta * normP / (1.0 - delta * normP2);
    if (!(alpha >= l1 && alpha >= l2))
        ++bad;
    return bad;
}

} // namespace xplab::oracle
