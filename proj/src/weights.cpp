#include "xplab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xplab {

std::string to_string(WeightKind kind)
{
    switch (kind) {
    case WeightKind::Constant: return "constant";
    case WeightKind::PowerLaw: return "power-law";
    case WeightKind::Geometric: return "geometric";
    case WeightKind::DoublyIndexed: return "doubly-indexed";
    case WeightKind::Explicit: return "explicit";
    }
    return "unknown";
}

WeightKind weight_kind_from_string(const std::string& name)
{
    if (name == "constant") return WeightKind::Constant;
    if (name == "power-law") return WeightKind::PowerLaw;
    if (name == "geometric") return WeightKind::Geometric;
    if (name == "doubly-indexed") return WeightKind::DoublyIndexed;
    if (name == "explicit") return WeightKind::Explicit;
    throw std::invalid_argument("unknown weight family kind '" + name + "'");
}

std::vector<double> generate(const WeightFamily& f)
{
    const std::size_t D = (f.kind == WeightKind::Explicit && f.D == 0) ? f.values.size() : f.D;
    return generate(f, D);
}

std::vector<double> generate(const WeightFamily& f, std::size_t D)
{
    std::vector<double> w;
    w.reserve(D);
    switch (f.kind) {
    case WeightKind::Constant:
        if (!(f.value > 0.0))
            throw std::invalid_argument("constant family: value must be positive");
        w.assign(D, f.value);
        break;
    case WeightKind::PowerLaw:
        if (!(f.a > 0.0))
            throw std::invalid_argument("power-law family: exponent a must be positive");
        for (std::size_t n = 1; n <= D; ++n)
            w.push_back(std::pow(static_cast<double>(n), -f.a));
        break;
    case WeightKind::Geometric:
        if (!(f.ratio > 0.0))
            throw std::invalid_argument("geometric family: ratio must be positive");
        for (std::size_t n = 1; n <= D; ++n)
            w.push_back(std::pow(f.ratio, static_cast<double>(n)));
        break;
    case WeightKind::DoublyIndexed: {
        if (!(f.a > 0.0))
            throw std::invalid_argument("doubly-indexed family: exponent a must be positive");
        if (f.equal_mass && !(f.p > 2.0))
            throw std::invalid_argument("doubly-indexed family: equal-mass levels need p > 2");
        if (!f.equal_mass && !(f.b >= 0.0))
            throw std::invalid_argument("doubly-indexed family: multiplicity exponent b must be nonnegative");
        const double q2 = 2.0 * f.p / (f.p - 2.0);
        for (std::size_t k = 1; w.size() < D; ++k) {
            const double wk = std::pow(static_cast<double>(k), -f.a);
            double m = f.equal_mass ? std::ceil(std::pow(wk, -q2) - 1e-9) : std::round(std::pow(static_cast<double>(k), f.b));
            m = std::max(1.0, m);
            for (double i = 0; i < m && w.size() < D; ++i)
                w.push_back(wk);
        }
        break;
    }
    case WeightKind::Explicit:
        if (D > f.values.size())
            throw std::invalid_argument("explicit family: truncation exceeds the listed values");
        for (std::size_t n = 0; n < D; ++n) {
            if (!(f.values[n] > 0.0))
                throw std::invalid_argument("explicit family: weights must be positive");
            w.push_back(f.values[n]);
        }
        break;
    }
    return w;
}

WeightFamily default_experiment_family(double p, std::size_t D)
{
    WeightFamily f;
    f.kind = WeightKind::DoublyIndexed;
    f.a = 0.25;
    f.equal_mass = true;
    f.p = p;
    f.D = D;
    return f;
}

double partial_mass(std::span<const double> w, double p, double eps, std::size_t from, std::size_t to)
{
    if (to > w.size())
        throw std::out_of_range("partial_mass: range exceeds the weight list");
    const double q2 = 2.0 * p / (p - 2.0);
    double s = 0.0;
    for (std::size_t n = from; n < to; ++n) {
        if (w[n] < eps)
            s += std::pow(w[n], q2);
    }
    return s;
}

RosenthalDiagnostic rosenthal_diagnostic(const WeightFamily& f, double p, double eps,
                                         std::span<const std::size_t> D_list)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("rosenthal_diagnostic: eps must be positive");
    if (!(p > 2.0))
        throw std::invalid_argument("rosenthal_diagnostic: p must exceed 2");
    std::size_t max_D = 0;
    for (std::size_t D : D_list)
        max_D = std::max(max_D, D);
    const std::vector<double> w = generate(f, 2 * max_D);

    RosenthalDiagnostic out{eps, p, {}};
    for (std::size_t D : D_list) {
        DiagnosticRow row;
        row.D = D;
        row.S = partial_mass(w, p, eps, 0, D);
        row.S_doubled = row.S + partial_mass(w, p, eps, D, 2 * D);
        if (row.S > 0.0) {
            row.growth = row.S_doubled / row.S;
            row.diverging = *row.growth >= kDivergenceThreshold;
        }
        out.rows.push_back(row);
    }
    return out;
}

std::vector<double> induced_weights(const BlockSystem& sys)
{
    return sys.induced_weights();
}

} // namespace xplab
