#include "xplab/cli.hpp"
#include "xplab/json_io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using xplab::io::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = XPLAB_FIXTURES_DIR;

std::string fx(const std::string& name)
{
    return (kFixtures / name).string();
}

struct Run {
    int exit = -1;
    std::string out;
    std::string err;

    json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    Run r;
    r.exit = xplab::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

const json* find_check(const json& rep, const std::string& name)
{
    for (const auto& c : rep.at("checks"))
        if (c.at("name") == name)
            return &c;
    return nullptr;
}

fs::path scratch_dir()
{
    const fs::path d = fs::temp_directory_path() / "xplab_cli_test";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("cli: norm on the two-point example")
{
    const auto r = run({"norm", "--x", fx("x_12.json")});
    REQUIRE(r.exit == 0);
    const auto j = r.report();
    CHECK(j.at("command") == "norm");
    CHECK(j.at("version") == xplab::cli::kVersion);
    CHECK(j.at("verdict") == true);
    const auto& res = j.at("results");
    CHECK(res.at("norm_p").get<double>() == doctest::Approx(std::pow(17.0, 0.25)));
    CHECK(res.at("norm_2w").get<double>() == doctest::Approx(std::sqrt(2.0)));
    CHECK(res.at("xp_norm").get<double>() == doctest::Approx(std::pow(17.0, 0.25)));

    const auto s = run({"norm", "--x", R"({"entries": [[2, 1]]})", "--space", fx("space_p4.json")});
    REQUIRE(s.exit == 0);
    CHECK(s.report().at("results").at("ratio").get<double>() == doctest::Approx(0.5));
}

TEST_CASE("cli: usage and input errors exit 1 and name the field")
{
    CHECK(run({}).exit == 1);
    CHECK(run({"bogus"}).exit == 1);
    CHECK(run({"norm"}).exit == 1);
    CHECK(run({"norm", "--x", fx("x_12.json"), "--frobnicate"}).exit == 1);
    const auto bad = run({"norm", "--x", fx("malformed.json")});
    CHECK(bad.exit == 1);
    CHECK(bad.err.find("x.entries[0]") != std::string::npos);
    const auto missing = run({"norm", "--x", fx("no_such_file.json")});
    CHECK(missing.exit == 1);
    CHECK(missing.err.find("no_such_file.json") != std::string::npos);
    const auto mismatch = run({"project", "--projection", fx("projection.json"), "--x", fx("x_other_space.json")});
    CHECK(mismatch.exit == 1);
    CHECK(mismatch.err.find("space") != std::string::npos);
    CHECK(run({"opnorm", "--operator", fx("operator_matrix.json"), "--mode", "3w"}).exit == 1);
    CHECK(run({"gen", "constants", "--delta", "0.1", "--c", "1", "--eps", "0.1"}).exit == 1);
    CHECK(run({"norm", "--x", "{not json"}).exit == 1);
}

TEST_CASE("cli: help and version")
{
    const auto h = run({"--help"});
    CHECK(h.exit == 0);
    CHECK(h.out.find("split") != std::string::npos);
    const auto v = run({"--version"});
    CHECK(v.exit == 0);
    CHECK(v.out.find(xplab::cli::kVersion) != std::string::npos);
    CHECK(run({"check", "thm13", "--help"}).exit == 0);
}

TEST_CASE("cli: global options, seed from the environment and byte-identical reports")
{
    const std::vector<std::string> args{"opnorm", "--operator", fx("projection.json"), "--budget", "8", "--seed", "9"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.exit == 0);
    CHECK(a.out == b.out);
    CHECK(a.report().at("config").at("seed") == 9);

    ::setenv("XPLAB_SEED", "31", 1);
    const auto e = run({"opnorm", "--operator", fx("projection.json"), "--budget", "8"});
    ::unsetenv("XPLAB_SEED");
    CHECK(e.report().at("config").at("seed") == 31);
    CHECK(run({"norm", "--x", fx("x_12.json")}).report().at("config").at("seed") == 0);

    const auto t = run({"norm", "--x", fx("x_12.json"), "--tol", "1e-6"});
    CHECK(t.report().at("config").at("tol").get<double>() == 1e-6);
    const auto timed = run({"norm", "--x", fx("x_12.json"), "--timing"});
    CHECK(timed.report().contains("wall_time_s"));
    CHECK_FALSE(t.report().contains("wall_time_s"));
}

TEST_CASE("cli: --out and --csv")
{
    const auto dir = scratch_dir();
    const auto out = (dir / "window.json").string();
    const auto csv = (dir / "window.csv").string();
    const auto r = run({"blocks", "window", "--projection", fx("projection.json"), "--out", out, "--csv", csv});
    REQUIRE(r.exit == 0);
    CHECK(r.out.empty());
    std::ifstream jf(out);
    const json j = json::parse(jf);
    CHECK(j.at("command") == "blocks window");
    std::ifstream cf(csv);
    std::string header, line;
    std::getline(cf, header);
    CHECK(header == "index,name,lhs,rhs,pass");
    std::size_t rows = 0;
    while (std::getline(cf, line))
        ++rows;
    CHECK(rows == j.at("checks").size());

    const auto d = run({"weights", "diag", "--family", fx("family_geometric.json"), "--eps", "1", "--D", "8", "--csv",
                        (dir / "diag.csv").string()});
    REQUIRE(d.exit == 0);
    std::ifstream df(dir / "diag.csv");
    std::getline(df, header);
    std::getline(df, line);
    CHECK(line.find("\"S(") != std::string::npos); // names with commas are quoted
}

TEST_CASE("cli: blocks")
{
    const auto ros = run({"blocks", "rosenthal", "--space", fx("space_p4.json"), "--I", "[1,2]"});
    REQUIRE(ros.exit == 0);
    const auto rj = ros.report();
    CHECK(rj.at("results").at("omega").get<double>() == doctest::Approx(1.0625));
    const auto& blk = rj.at("results").at("block");
    CHECK(blk.at("entries") == json::parse("[[1, 1.0], [2, 0.5]]"));
    CHECK(blk.contains("delta"));
    CHECK(blk.contains("c"));

    CHECK(run({"blocks", "check", "--block", fx("block.json")}).exit == 0);
    const auto fail = run({"blocks", "check", "--block", fx("block_failing.json")});
    CHECK(fail.exit == 2);
    CHECK(find_check(fail.report(), "a")->at("pass") == false);

    for (const char* form : {"support", "restricted"}) {
        const auto h = run({"blocks", "holder", "--block", fx("block.json"), "--x", fx("x_d6.json"), "--form", form});
        CHECK(h.exit == 0);
        CHECK(h.report().at("checks").size() == 2);
    }
    CHECK(run({"blocks", "holder", "--block", fx("block.json"), "--x", fx("x_d6.json"), "--form", "x"}).exit == 1);

    const auto w = run({"blocks", "window", "--projection", fx("projection.json")});
    CHECK(w.exit == 0);
    CHECK(w.report().at("results").at("induced_weights").size() == 3);
}

TEST_CASE("cli: project and opnorm")
{
    const auto p = run({"project", "--projection", fx("projection.json"), "--x", fx("x_d12.json")});
    REQUIRE(p.exit == 0);
    CHECK(find_check(p.report(), "gain")->at("pass") == true);
    CHECK(find_check(p.report(), "idempotence")->at("pass") == true);

    const auto o = run({"opnorm", "--operator", fx("projection.json"), "--budget", "8"});
    REQUIRE(o.exit == 0);
    const auto oj = o.report().at("results");
    CHECK(oj.contains("lower"));
    CHECK(oj.contains("witness"));
    CHECK(oj.at("analytic_upper").is_number());
    CHECK(oj.at("lower").get<double>() <= oj.at("analytic_upper").get<double>() * (1 + 1e-9));

    const auto t = run({"opnorm", "--operator", fx("operator_gram.json"), "--mode", "2w", "--budget", "4",
                        "--threads", "2", "--max-iters", "50"});
    REQUIRE(t.exit == 0);
    CHECK(t.report().at("results").at("exact_2w").get<double>() == doctest::Approx(1.0));
    CHECK(t.report().at("results").at("analytic_upper") == t.report().at("results").at("exact_2w"));
    CHECK(run({"opnorm", "--operator", fx("operator_matrix.json"), "--budget", "4"}).exit == 0);
}

TEST_CASE("cli: split")
{
    const auto s = run({"split", "--x", fx("split_x.json"), "--projection", fx("split_projection.json"),
                        "--constants", fx("split_constants.json"), "--N", "1"});
    REQUIRE(s.exit == 0);
    const auto j = s.report();
    CHECK(j.at("results").at("premise").at("met") == true);
    CHECK(find_check(j, "r(y)<=alpha")->at("pass") == true);
    CHECK(find_check(j, "r(z)>=beta")->at("pass") == true);
    CHECK(j.at("results").at("unverified_hypothesis").is_string());

    // Norms measured from the operator instead of supplied.
    const auto m = run({"split", "--x", fx("split_x.json"), "--projection", fx("split_projection.json"),
                        "--constants",
                        R"({"c": 2.4386348620440628, "delta": 0.2896870826239297, "eps": 0.4271480813381883})",
                        "--N", "1"});
    REQUIRE(m.exit == 0);
    CHECK(m.report().at("results").at("norms").at("certified") == true);
    CHECK(m.report().at("results").at("norms").at("normP").get<double>() == doctest::Approx(1.0));

    const auto win = run({"split", "--x", fx("split_x.json"), "--projection", fx("split_projection.json"),
                          "--constants", R"({"delta": 0.2, "c": 2, "eps": 0.5})", "--N", "1"});
    CHECK(win.exit == 1);
    CHECK(win.err.find("ratio-window") != std::string::npos);

    const auto pre = run({"split", "--x", fx("split_x.json"), "--projection", fx("split_projection.json"),
                          "--constants", fx("split_constants.json"), "--N", "40"});
    CHECK(pre.exit == 1);
    CHECK(pre.err.find("support") != std::string::npos);
    CHECK(run({"split", "--x", fx("split_x.json"), "--projection", fx("split_projection.json"), "--constants",
               R"({"delta": 0.2, "c": 2})", "--N", "1"})
              .exit == 1);
}

TEST_CASE("cli: check")
{
    const auto t = run({"check", "thm13", "--witness", fx("thm13_witnesses.json")});
    CHECK(t.exit == 0);
    CHECK(t.report().at("results").at("witnesses") == 2);
    const auto over = run({"check", "thm13", "--witness", fx("thm13_witnesses.json"), "--constants",
                           R"({"eps_prime": 0.6})"});
    CHECK(over.exit == 2);

    const auto pb = run({"check", "proof-bounds", "--y", fx("y_proof.json"), "--rho", "0.3", "--delta", "0.5",
                         "--normalize"});
    CHECK(pb.exit == 0);
    CHECK(pb.report().at("checks").size() == 6);
    CHECK(run({"check", "proof-bounds", "--y", fx("y_proof.json"), "--rho", "0.3"}).exit == 1); // not unit

    CHECK(run({"check", "prop12", "--projection", fx("projection.json"), "--samples", "200"}).exit == 0);
    CHECK(run({"check", "prop24", "--input", fx("prop24_in_span.json")}).exit == 0);
    const auto ce = run({"check", "prop24", "--input", fx("prop24_counterexample.json")});
    CHECK(ce.exit == 2);
    CHECK(find_check(ce.report(), "b[0]")->at("lhs").get<double>() == doctest::Approx(0.8));
    CHECK(run({"check", "mk", "--projection", fx("projection.json"), "--K", "2"}).exit == 0);
    const auto ch = run({"check", "chain", "--input", fx("chain.json")});
    CHECK(ch.exit == 0);
    CHECK(ch.report().at("results").at("beta_prime_certified") == true);
}

TEST_CASE("cli: generators")
{
    const auto g = run({"gen", "thm13", "--space", fx("space_family.json"), "--eps", "0.9", "--delta", "0.8", "--c",
                        "1.5", "--count", "3", "--seed", "4"});
    REQUIRE(g.exit == 0);
    CHECK(g.report().at("results").at("witnesses").size() == 3);
    // The generator's report feeds straight back into the checker.
    const auto path = (scratch_dir() / "gen.json").string();
    std::ofstream(path) << g.out;
    CHECK(run({"check", "thm13", "--witness", path}).exit == 0);

    const auto inf = run({"gen", "thm13", "--space", fx("space_p4.json"), "--eps", "5"});
    CHECK(inf.exit == 1);

    const auto k = run({"gen", "constants", "--delta", "0.25", "--c", "1", "--eps", "0.1", "--normP", "2", "--normP2",
                        "2", "--p", "4"});
    REQUIRE(k.exit == 0);
    CHECK(k.report().at("results").at("constants").at("beta").get<double>() == doctest::Approx(0.05));
    CHECK(run({"gen", "constants", "--delta", "0.25", "--c", "1", "--eps", "0.1", "--projection",
               fx("projection.json")})
              .exit == 0);
    CHECK(run({"gen", "constants", "--delta", "0.6", "--c", "1", "--eps", "0.1", "--normP", "2", "--normP2", "2",
               "--p", "4"})
              .exit == 1);
}

TEST_CASE("cli: classify, diag, experiment and weights")
{
    const auto kp = run({"classify", "kp", "--vectors", fx("kp_vectors.json"), "--C", "0.5", "--N", "8"});
    REQUIRE(kp.exit == 0);
    CHECK(kp.report().at("results").at("class") == "ellp-like");

    const auto d = run({"diag", "prop21", "--input", fx("prop21.json"), "--K", "2", "--window", "2"});
    REQUIRE(d.exit == 0);
    CHECK(d.report().at("checks").empty());
    CHECK(d.report().at("results").at("window_ratios").size() == 2);

    const auto df = run({"experiment", "defect", "--input", fx("defect.json"), "--alpha", "2", "--samples", "20"});
    REQUIRE(df.exit == 0);
    CHECK(df.report().at("results").at("worst_defect").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(run({"experiment", "defect", "--samples", "5", "--D", "128", "--from", "64"}).exit == 0);

    const auto acc = run({"experiment", "acceptance", "--criterion", "1", "--seed", "1"});
    CHECK(acc.exit == 0);
    CHECK(run({"experiment", "acceptance", "--criterion", "12"}).exit == 1);

    const auto wg = run({"weights", "gen", "--family", fx("family_power.json"), "--D", "3"});
    REQUIRE(wg.exit == 0);
    CHECK(wg.report().at("results").at("weights").size() == 3);
    const auto wd = run({"weights", "diag", "--family", fx("family_geometric.json"), "--eps", "1", "--eps", "0.01",
                         "--D", "8", "--D", "16"});
    REQUIRE(wd.exit == 0);
    CHECK(wd.report().at("results").at("tables").size() == 2);
    CHECK(run({"weights", "induced", "--projection", fx("projection.json")}).exit == 0);
}

TEST_CASE("cli: batch")
{
    const auto e = run({"batch", "--config", fx("batch_empty.json")});
    REQUIRE(e.exit == 0);
    CHECK(e.report().at("results").at("runs").empty());

    const auto s = run({"batch", "--config", fx("batch_small.json")});
    CHECK(s.exit == 2);
    const auto sj = s.report().at("results");
    CHECK(sj.at("passed") == 2);
    CHECK(sj.at("failed") == 1);
    CHECK(sj.at("runs").at(0).at("name") == "norm");
    CHECK(sj.at("runs").at(0).at("report").at("results").contains("norm_p"));

    // One bad member aborts before anything runs, so no output is written.
    fs::remove(kFixtures / "never_written.json");
    const auto b = run({"batch", "--config", fx("batch_bad.json")});
    CHECK(b.exit == 1);
    CHECK(b.err.find("runs[1]") != std::string::npos);
    CHECK_FALSE(fs::exists(kFixtures / "never_written.json"));

    CHECK(run({"batch", "--config", fx("no_such_batch.json")}).exit == 1);
    CHECK(run({"batch", "--config", R"({"runs": [{"args": ["batch", "--config", "x"]}]})"}).exit == 1);
}
