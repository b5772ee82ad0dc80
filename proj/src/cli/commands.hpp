#pragma once

// Internal plumbing of the command line: every command is parsed and its
// inputs loaded (prepare) before anything runs (execute).

#include "xplab/cli.hpp"
#include "xplab/criteria.hpp"
#include "xplab/json_io.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace xplab::cli::detail {

namespace fs = std::filesystem;
using io::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An unasserted numeric row, exported to CSV after the checks.
struct Row {
    std::string name;
    double lhs = 0;
    double rhs = 0;
};

struct Report {
    json results = json::object();
    CriterionReport checks;
    std::vector<Row> rows;
};

using Task = std::function<Report()>;

struct Common {
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::string out;
    std::string csv;
    bool timing = false;
};

/// Resolves relative paths against `base` (the batch config directory).
struct Loader {
    fs::path base;

    fs::path resolve(const std::string& p) const;
    /// Inline JSON or a file path.
    json doc(const std::string& text) const;
    /// The space of a document: --space if given, else doc["space"], else
    /// the document itself when it carries "p" and "weights".
    WeightedSpace space(const json& doc, const std::string& space_opt, const std::string& what) const;
};

/// doc[key] when present, else doc.
const json& pick(const json& doc, const std::string& key);

struct Leaf {
    CLI::App* app = nullptr;
    std::string name;
    std::function<Task()> build;
};

struct Prepared {
    std::string command;
    std::vector<std::string> args;
    Common common;
    fs::path base;
    Task task;
};

struct Outcome {
    int exit = kExitOk;
    json report; // null on error
};

void register_commands(CLI::App& app, const Loader& loader, const Common& common, std::vector<Leaf>& leaves);

/// Parses and loads. nullopt when help or the version was printed. Throws
/// on usage and input errors.
std::optional<Prepared> prepare(const std::vector<std::string>& args, const fs::path& base, std::ostream& out,
                                std::ostream& err);

/// Runs a prepared task and writes its report.
Outcome execute(const Prepared& p, std::ostream& out, std::ostream& err);

} // namespace xplab::cli::detail
