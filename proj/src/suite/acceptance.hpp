#pragma once

// Property runs behind the acceptance criteria. Each runner is
// deterministic in its seed; sizes are fixed.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xplab::suite {

struct Stat {
    std::string name;
    double value = 0;
};

struct Outcome {
    int criterion = 0;
    std::string title;
    bool pass = false;
    std::vector<Stat> stats;
    std::vector<std::string> notes;
};

struct Options {
    std::uint64_t seed = 1;
    /// Where counterexample repro files are written.
    std::filesystem::path repro_dir = ".";
};

inline constexpr int kFirstCriterion = 1;
inline constexpr int kLastCriterion = 8;

std::string title(int criterion);

/// Throws std::out_of_range for criteria outside 1..8.
Outcome run_criterion(int criterion, const Options& opts = {});

} // namespace xplab::suite
