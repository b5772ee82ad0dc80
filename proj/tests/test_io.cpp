#include "helpers.hpp"

#include "suite/generators.hpp"
#include "xplab/json_io.hpp"
#include "xplab/random.hpp"

using namespace xplab;
using io::json;

TEST_CASE("vector documents round-trip")
{
    Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        const auto s = gen::space(rng, 20, rng.uniform(2.1, 8.0));
        const auto x = gen::vector(rng, s, 10);
        const json j = io::to_json(x);
        const auto s2 = io::space_from_json(json::parse(io::to_json(s).dump()));
        CHECK(s2 == s);
        CHECK(io::vector_from_json(json::parse(j.dump()), s2, "x") == x);
    }
}

TEST_CASE("vector document forms")
{
    const WeightedSpace s(4.0, {1.0, 0.5, 0.25});
    const SpVector want(s, {{1, 1.0}, {3, -2.0}});
    CHECK(io::vector_from_json(json::parse("[1, 0, -2]"), s, "x") == want);
    CHECK(io::vector_from_json(json::parse(R"({"dense": [1, 0, -2]})"), s, "x") == want);
    CHECK(io::vector_from_json(json::parse(R"({"entries": [[3, -2], [1, 1]]})"), s, "x") == want);
    CHECK_THROWS_AS(io::vector_from_json(json::parse("[1, 0, -2, 4]"), s, "x"), io::FormatError);
    CHECK_THROWS_AS(io::vector_from_json(json::parse(R"({"entries": [[0, 1]]})"), s, "x"), io::FormatError);
    try {
        io::vector_from_json(json::parse(R"({"entries": [[1, 1], [2, "a"]]})"), s, "x");
        FAIL("expected a format error");
    } catch (const io::FormatError& e) {
        CHECK(e.field() == "x.entries[1]");
    }
}

TEST_CASE("spaces from weight families")
{
    const auto s = io::space_from_json(json::parse(R"({"p": 4, "weights": {"kind": "power-law", "a": 0.1, "D": 3}})"));
    CHECK(s.dim() == 3);
    CHECK(s.weight(2) == doctest::Approx(std::pow(2.0, -0.1)));
    const auto f = io::family_from_json(io::to_json(default_experiment_family(4.0, 64)));
    CHECK(generate(f) == generate(default_experiment_family(4.0, 64)));
    CHECK_THROWS_AS(io::space_from_json(json::parse(R"({"p": 4, "weights": {"kind": "nope", "D": 3}})")),
                    io::FormatError);
    CHECK_THROWS_AS(io::space_from_json(json::parse(R"({"weights": [1]})")), io::FormatError);
    CHECK_THROWS_AS(io::space_from_json(json::parse(R"({"p": 1.5, "weights": [1]})")), io::FormatError);
}

TEST_CASE("block systems round-trip")
{
    Rng rng(62);
    for (int t = 0; t < 30; ++t) {
        const auto s = gen::space(rng, 24, rng.uniform(2.1, 8.0));
        const auto sys = gen::block_system(rng, s, 4);
        const auto P = io::projection_from_json(json::parse(io::to_json(sys).dump()));
        REQUIRE(P.system().size() == sys.size());
        for (std::size_t j = 0; j < sys.size(); ++j) {
            CHECK(P.system().blocks()[j].vector() == sys.blocks()[j].vector());
            CHECK(P.system().blocks()[j].designated() == sys.blocks()[j].designated());
        }
        CHECK(P.system().delta() == sys.delta());
        CHECK(P.system().c() == sys.c());
    }
}

TEST_CASE("operator documents")
{
    const json m = json::parse(R"({"kind": "matrix", "space": {"p": 4, "weights": [1, 0.5]}, "matrix": [[1, 2], [3, 4]]})");
    const auto A = io::operator_from_json(m);
    const auto y = A->apply(SpVector::basis(A->space(), 1));
    CHECK(y[1] == 1.0);
    CHECK(y[2] == 3.0);
    const json id = json::parse(R"({"type": "identity", "scale": 2, "space": {"p": 4, "weights": [1, 0.5]}})");
    CHECK(io::operator_from_json(id)->apply(SpVector::basis(A->space(), 2))[2] == 2.0);
    CHECK_THROWS_AS(io::operator_from_json(json::parse(R"({"kind": "bogus", "space": {"p": 4, "weights": [1]}})")),
                    io::FormatError);
    CHECK_THROWS_AS(io::operator_from_json(json::parse(
                        R"({"kind": "matrix", "space": {"p": 4, "weights": [1, 0.5]}, "matrix": [[1, 2]]})")),
                    io::FormatError);
    const json half = json::parse(R"({"space": {"p": 4, "weights": [1, 0.5]}, "delta": 1,
        "blocks": [{"entries": [[1, 1]], "E": [1]}]})");
    CHECK_THROWS_AS(io::projection_from_json(half), io::FormatError);
}

TEST_CASE("non-finite check values are written as strings")
{
    const auto c = Check::make("x", std::numeric_limits<double>::infinity(), Relation::LessEq, 1.0);
    const json j = io::to_json(c);
    CHECK(j.at("lhs") == "inf");
    CHECK(j.at("pass") == false);
}

TEST_CASE("witness documents round-trip")
{
    const WeightedSpace s(4.0, std::vector<double>(12, 0.5));
    const auto ws = gen_thm13_witnesses(s, 1.0, 1.0, 0.6, 2, 1);
    for (const auto& w : ws) {
        const auto back = io::witness_from_json(json::parse(io::to_json(w).dump()));
        CHECK(back.x == w.x);
        CHECK(back.E == w.E);
        CHECK(back.N == w.N);
        CHECK(back.eps_prime == w.eps_prime);
        const auto over = io::witness_from_json(io::to_json(w), json{{"eps", 0.9}});
        CHECK(over.eps == 0.9);
    }
}
