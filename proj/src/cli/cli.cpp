#include "xplab/cli.hpp"

#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace xplab::cli {

namespace detail {

fs::path Loader::resolve(const std::string& p) const
{
    const fs::path q(p);
    return q.is_absolute() || base.empty() ? q : base / q;
}

json Loader::doc(const std::string& text) const
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
        return io::read_inline_or_file(text);
    return io::read_file(resolve(text));
}

WeightedSpace Loader::space(const json& doc, const std::string& space_opt, const std::string& what) const
{
    if (!space_opt.empty())
        return io::space_from_json(this->doc(space_opt), "space");
    if (doc.is_object() && doc.contains("space"))
        return io::space_from_json(doc.at("space"), what + ".space");
    if (doc.is_object() && doc.contains("p") && doc.contains("weights"))
        return io::space_from_json(doc, what);
    throw io::FormatError(what + ".space", "missing (embed it or pass --space)");
}

const json& pick(const json& doc, const std::string& key)
{
    if (doc.is_object() && doc.contains(key))
        return doc.at(key);
    return doc;
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + '"';
}

} // namespace

std::optional<Prepared> prepare(const std::vector<std::string>& args, const fs::path& base, std::ostream& out,
                                std::ostream& err)
{
    CLI::App app{"Numerical experiments on the weighted sequence spaces X_{p,w}", "xplab"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--seed", common.seed, "seed for every stochastic step")->envname("XPLAB_SEED");
    app.add_option("--tol", common.tol, "relative slack on non-strict checks");
    app.add_option("--out", common.out, "write the report here instead of stdout");
    app.add_option("--csv", common.csv, "also write (index, name, lhs, rhs, pass) rows here");
    app.add_flag("--timing", common.timing, "add wall time to the report (breaks byte identity)");
    app.set_version_flag("--version", kVersion);

    Loader loader{base};
    std::vector<Leaf> leaves;
    register_commands(app, loader, common, leaves);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return std::nullopt;
        }
        throw UsageError(e.what());
    }

    for (auto& leaf : leaves) {
        if (!leaf.app->parsed())
            continue;
        // Only the deepest parsed command builds the task.
        bool deeper = false;
        for (const auto* sub : leaf.app->get_subcommands())
            deeper = deeper || sub->parsed();
        if (deeper)
            continue;
        Prepared p;
        p.command = leaf.name;
        p.args = args;
        p.common = common;
        p.base = base;
        p.task = leaf.build();
        return p;
    }
    throw UsageError("no command given");
}

Outcome execute(const Prepared& p, std::ostream& out, std::ostream& err)
{
    Outcome res;
    Report r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r = p.task();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        res.exit = kExitUsage;
        return res;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json j;
    j["command"] = p.command;
    j["version"] = kVersion;
    j["config"] = {{"args", p.args}, {"seed", p.common.seed}, {"tol", p.common.tol}};
    j["results"] = r.results;
    j["checks"] = io::to_json(r.checks).at("checks");
    j["verdict"] = r.checks.verdict();
    if (p.common.timing)
        j["wall_time_s"] = wall;

    try {
        const Loader L{p.base};
        const std::string text = j.dump(2) + "\n";
        if (p.common.out.empty()) {
            out << text;
        } else {
            std::ofstream f(L.resolve(p.common.out));
            if (!f)
                throw io::FormatError(p.common.out, "cannot write report");
            f << text;
        }
        if (!p.common.csv.empty()) {
            std::ofstream f(L.resolve(p.common.csv));
            if (!f)
                throw io::FormatError(p.common.csv, "cannot write CSV");
            f << "index,name,lhs,rhs,pass\n";
            std::size_t i = 0;
            for (const auto& c : r.checks.checks)
                f << i++ << ',' << csv_field(c.name) << ',' << fmt(c.lhs) << ',' << fmt(c.rhs) << ',' << (c.pass ? 1 : 0)
                  << '\n';
            for (const auto& row : r.rows)
                f << i++ << ',' << csv_field(row.name) << ',' << fmt(row.lhs) << ',' << fmt(row.rhs) << ",\n";
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        res.exit = kExitUsage;
        return res;
    }
    if (p.common.timing)
        err << p.command << ": " << wall << " s\n";
    res.report = std::move(j);
    res.exit = r.checks.verdict() ? kExitOk : kExitCheckFailed;
    return res;
}

} // namespace detail

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::optional<detail::Prepared> p;
    try {
        p = detail::prepare(args, {}, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!p)
        return kExitOk;
    return detail::execute(*p, out, err).exit;
}

} // namespace xplab::cli
