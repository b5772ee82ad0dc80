#pragma once

#include "xplab/operators.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xplab {

enum class WeightKind { Constant, PowerLaw, Geometric, DoublyIndexed, Explicit };

/// A deterministic weight sequence truncated at D.
///
///  constant        w_n = value
///  power-law       w_n = n^{-a}
///  geometric       w_n = ratio^n
///  doubly-indexed  level k has weight k^{-a}, repeated m_k times, where
///                  m_k = round(k^b), or, with equal_mass, the smallest m_k
///                  making m_k w_k^{2p/(p-2)} >= 1
///  explicit        the listed values
struct WeightFamily {
    WeightKind kind = WeightKind::Constant;
    double value = 0.5;
    double a = 0.25;
    double ratio = 0.5;
    double b = 2.0;
    bool equal_mass = false;
    double p = 4.0;
    std::vector<double> values;
    std::size_t D = 0;
};

std::string to_string(WeightKind kind);
WeightKind weight_kind_from_string(const std::string& name);

/// Throws std::invalid_argument on nonpositive parameters or, for explicit
/// lists, when D exceeds the list.
std::vector<double> generate(const WeightFamily& f);
/// Same family, different truncation.
std::vector<double> generate(const WeightFamily& f, std::size_t D);

/// Doubly-indexed levels w_k = k^{-1/4}, equal weight mass per level.
WeightFamily default_experiment_family(double p, std::size_t D);

/// Growth factor at or above which a doubling is reported as diverging.
inline constexpr double kDivergenceThreshold = 1.5;

/// sum over from < n <= to with w_n < eps of w_n^{2p/(p-2)}.
double partial_mass(std::span<const double> w, double p, double eps, std::size_t from, std::size_t to);

struct DiagnosticRow {
    std::size_t D = 0;
    double S = 0;              // S(eps, D)
    double S_doubled = 0;      // S(eps, 2D)
    std::optional<double> growth; // S(eps, 2D) / S(eps, D), absent when S = 0
    bool diverging = false;
};

struct RosenthalDiagnostic {
    double eps = 0;
    double p = 0;
    std::vector<DiagnosticRow> rows;
};

/// Finite-truncation partial sums of the weight-mass series restricted to
/// small weights. A heuristic, never a proof of divergence.
RosenthalDiagnostic rosenthal_diagnostic(const WeightFamily& f, double p, double eps,
                                         std::span<const std::size_t> D_list);

/// w'_j = omega(E_j)^{(p-2)/2p} of a block system.
std::vector<double> induced_weights(const BlockSystem& sys);

} // namespace xplab
