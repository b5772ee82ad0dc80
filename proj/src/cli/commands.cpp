#include "cli/commands.hpp"

#include "suite/acceptance.hpp"
#include "suite/generators.hpp"
#include "xplab/blocks.hpp"
#include "xplab/error.hpp"
#include "xplab/operators.hpp"
#include "xplab/random.hpp"
#include "xplab/splitter.hpp"
#include "xplab/weights.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace xplab::cli::detail {

namespace {

using R = Relation;

void add(std::vector<Leaf>& leaves, CLI::App* app, std::string name, std::function<Task()> build)
{
    leaves.push_back({app, std::move(name), std::move(build)});
}

void append(CriterionReport& into, const CriterionReport& from, const std::string& prefix = "")
{
    for (auto c : from.checks) {
        c.name = prefix + c.name;
        into.checks.push_back(std::move(c));
    }
}

json vec_json(const SpVector& x)
{
    return io::to_json(x).at("entries");
}

SpVector load_vector(const Loader& L, const std::string& text, const std::string& space_opt, const std::string& key)
{
    const json d = L.doc(text);
    const WeightedSpace sp = L.space(d, space_opt, key);
    return io::vector_from_json(pick(d, key), sp, key);
}

std::unique_ptr<LinearOperator> load_operator(const Loader& L, const std::string& text, const std::string& what)
{
    return io::operator_from_json(L.doc(text), what);
}

BlockProjection load_projection(const Loader& L, const std::string& text)
{
    return io::projection_from_json(L.doc(text), "projection");
}

void same_space(const WeightedSpace& a, const WeightedSpace& b, const std::string& what)
{
    if (!(a == b))
        throw io::FormatError(what, "space differs from the operator's space");
}

// Operators are not copyable through the base class; tasks share them.
template <class T>
std::shared_ptr<T> share(std::unique_ptr<T> p)
{
    return std::shared_ptr<T>(std::move(p));
}

NormMode parse_mode(const std::string& s)
{
    if (s == "xp")
        return NormMode::XP;
    if (s == "2w")
        return NormMode::TwoW;
    throw io::FormatError("--mode", "expected xp or 2w, got '" + s + "'");
}

// ---------------------------------------------------------------- norm

void reg_norm(CLI::App& app, const Loader& L, const Common&, std::vector<Leaf>& leaves)
{
    struct O {
        std::string x, space;
    };
    auto o = std::make_shared<O>();
    auto* s = app.add_subcommand("norm", "|x|_p, |x|_2w, the norm and the ratio of a vector");
    s->add_option("--x", o->x, "vector document")->required();
    s->add_option("--space", o->space, "space document, when the vector does not carry one");
    add(leaves, s, "norm", [o, &L] {
        SpVector x = load_vector(L, o->x, o->space, "x");
        return Task([x] {
            Report r;
            const double np = norm_p(x), n2 = norm_2w(x);
            r.results = {{"norm_p", np}, {"norm_2w", n2}, {"xp_norm", xp_norm(x)}};
            r.results["ratio"] = x.is_zero() ? json(nullptr) : json(ratio(x));
            return r;
        });
    });
}

// ---------------------------------------------------------------- blocks

void reg_blocks(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    auto* g = app.add_subcommand("blocks", "Extremal blocks, block conditions and Hölder estimates");
    g->require_subcommand(1);

    {
        struct O {
            std::string space, I;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("rosenthal", "Extremal block on an index set, with its norm identities");
        s->add_option("--space", o->space, "space document")->required();
        s->add_option("--I", o->I, "index set, e.g. [1,2]")->required();
        add(leaves, s, "blocks rosenthal", [o, &L, &common] {
            const WeightedSpace sp = io::space_from_json(L.doc(o->space), "space");
            const SupportSet I = io::set_from_json(L.doc(o->I), "I");
            const double tol = common.tol;
            return Task([sp, I, tol] {
                const RosenthalBlock y = make_rosenthal(sp, I);
                const double om = omega(sp, I);
                const double p = sp.p();
                Report r;
                r.results = {{"block", io::to_json(rosenthal_as_block(y))}, {"omega", om}};
                r.checks.checks.push_back(Check::make("norm_2w", norm_2w(y.vector), R::Equal, std::sqrt(om), tol));
                r.checks.checks.push_back(Check::make("norm_p", norm_p(y.vector), R::Equal, std::pow(om, 1 / p), tol));
                r.checks.checks.push_back(
                    Check::make("ratio", ratio(y.vector), R::Equal, std::pow(om, sp.ratio_exponent()), tol));
                return r;
            });
        });
    }
    {
        struct O {
            std::string block, space;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("check", "Conditions (a), (b) and the full-support form of a block");
        s->add_option("--block", o->block, "block document with delta and c")->required();
        s->add_option("--space", o->space, "space document, when the block does not carry one");
        add(leaves, s, "blocks check", [o, &L] {
            const json d = L.doc(o->block);
            const WeightedSpace sp = L.space(d, o->space, "block");
            const json& bj = pick(d, "block");
            const Block b = io::block_from_json(bj, sp, io::number(bj, "delta", "block"), io::number(bj, "c", "block"),
                                                "block");
            return Task([b] {
                const BlockConditions& k = b.conditions();
                Report r;
                r.checks.checks.push_back(Check::make("a", k.a_lhs, R::GreaterEq, k.a_rhs));
                r.checks.checks.push_back(Check::make("b", k.b_lhs, R::GreaterEq, k.b_rhs));
                r.rows.push_back({"support_form", k.s_lhs, k.s_rhs});
                r.results = {{"admissible", b.admissible()},
                             {"support_form", {{"lhs", k.s_lhs}, {"rhs", k.s_rhs}, {"holds", k.support_form}}},
                             {"tight_delta", b.tight_delta()},
                             {"tight_c", b.tight_c()},
                             {"tight_support_c", b.tight_support_c()}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string block, x, space, form = "support";
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("holder", "Hölder estimates of a block functional at x");
        s->add_option("--block", o->block, "block document with delta and c")->required();
        s->add_option("--x", o->x, "vector document")->required();
        s->add_option("--space", o->space, "space document, when the inputs do not carry one");
        s->add_option("--form", o->form, "support or restricted")->check(CLI::IsMember({"support", "restricted"}));
        add(leaves, s, "blocks holder", [o, &L] {
            const json d = L.doc(o->block);
            const WeightedSpace sp = L.space(d, o->space, "block");
            const json& bj = pick(d, "block");
            const Block b = io::block_from_json(bj, sp, io::number(bj, "delta", "block"), io::number(bj, "c", "block"),
                                                "block");
            const SpVector x = load_vector(L, o->x, o->space, "x");
            same_space(sp, x.space(), "x");
            const FunctionalForm form = o->form == "support" ? FunctionalForm::Support : FunctionalForm::Restricted;
            return Task([b, x, form] {
                const HolderBounds h = holder_bounds(b, x, form);
                Report r;
                r.results = {{"functional", h.functional}, {"applicable", h.applicable}};
                auto mk = [&](const char* name, double lhs, double rhs) {
                    return h.applicable ? Check::make(name, lhs, R::LessEq, rhs, 1e-12)
                                        : Check::not_applicable(name, lhs, R::LessEq, rhs);
                };
                r.checks.checks.push_back(mk("2", h.lhs2, h.factor2 * h.rhs2));
                r.checks.checks.push_back(mk("p", h.lhsp, h.factorp * h.rhsp));
                return r;
            });
        });
    }
    {
        struct O {
            std::string projection;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("window", "Ratio window c^-1 w'_j <= r(z_j) <= delta^-1 w'_j per block");
        s->add_option("--projection", o->projection, "block system document")->required();
        add(leaves, s, "blocks window", [o, &L] {
            auto P = std::make_shared<BlockProjection>(load_projection(L, o->projection));
            return Task([P] {
                Report r;
                json rows = json::array();
                for (const auto& w : ratio_bounds_check(P->system())) {
                    const std::string j = std::to_string(w.j);
                    r.checks.checks.push_back(Check::make("lo[" + j + "]", w.lo, R::LessEq, w.r, 1e-12));
                    r.checks.checks.push_back(Check::make("hi[" + j + "]", w.r, R::LessEq, w.hi, 1e-12));
                    rows.push_back({{"j", w.j}, {"lo", w.lo}, {"r", w.r}, {"hi", w.hi}});
                }
                r.results = {{"blocks", rows}, {"induced_weights", P->system().induced_weights()}};
                return r;
            });
        });
    }
}

// ---------------------------------------------------------------- project

void reg_project(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    struct O {
        std::string projection, x;
    };
    auto o = std::make_shared<O>();
    auto* s = app.add_subcommand("project", "Apply a block projection and check its bound and idempotence");
    s->add_option("--projection", o->projection, "block system document")->required();
    s->add_option("--x", o->x, "vector document (space defaults to the projection's)")->required();
    add(leaves, s, "project", [o, &L, &common] {
        auto P = std::make_shared<BlockProjection>(load_projection(L, o->projection));
        const json d = L.doc(o->x);
        const bool own = d.is_object() && (d.contains("space") || d.contains("p"));
        const WeightedSpace sp = own ? L.space(d, "", "x") : P->space();
        const SpVector x = io::vector_from_json(pick(d, "x"), sp, "x");
        same_space(P->space(), sp, "x");
        const double tol = common.tol;
        return Task([P, x, tol] {
            const SpVector Px = project(*P, x);
            const SpVector PPx = project(*P, Px);
            const double bound = prop12_bound(P->system());
            const double nx = xp_norm(x), npx = xp_norm(Px);
            Report r;
            r.results = {{"Px", vec_json(Px)}, {"bound", bound}, {"norm_x", nx}, {"norm_Px", npx}};
            r.checks.checks.push_back(Check::make("gain", npx, R::LessEq, bound * nx, tol));
            r.checks.checks.push_back(Check::make("idempotence", xp_norm(PPx - Px), R::LessEq, tol * npx));
            return r;
        });
    });
}

// ---------------------------------------------------------------- opnorm

void reg_opnorm(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    struct O {
        std::string op, mode = "xp";
        std::size_t budget = 64, threads = 1, max_iters = 200;
    };
    auto o = std::make_shared<O>();
    auto* s = app.add_subcommand("opnorm", "Seeded lower bound on an operator norm");
    s->add_option("--operator", o->op, "operator document")->required();
    s->add_option("--mode", o->mode, "xp or 2w");
    s->add_option("--budget", o->budget, "number of starts")->check(CLI::PositiveNumber);
    s->add_option("--threads", o->threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
    s->add_option("--max-iters", o->max_iters, "pattern-search sweeps per start");
    add(leaves, s, "opnorm", [o, &L, &common] {
        auto A = share(load_operator(L, o->op, "operator"));
        OpNormOptions opts;
        opts.mode = parse_mode(o->mode);
        opts.budget = o->budget;
        opts.threads = o->threads;
        opts.max_iters = o->max_iters;
        opts.seed = common.seed;
        const double tol = common.tol;
        return Task([A, opts, tol] {
            const OpNormEstimate e = estimate_opnorm(*A, opts);
            Report r;
            r.results = {{"lower", e.lower},
                         {"witness", vec_json(e.witness)},
                         {"zero_operator", e.zero_operator},
                         {"samples", e.samples},
                         {"best_start", e.best_start}};
            r.results["analytic_upper"] = e.upper ? json(*e.upper) : json(nullptr);
            if (opts.mode == NormMode::TwoW)
                r.results["exact_2w"] = exact_norm_2w(*A);
            if (e.upper)
                r.checks.checks.push_back(Check::make("lower<=upper", e.lower, R::LessEq, *e.upper, tol));
            return r;
        });
    });
}

// ---------------------------------------------------------------- split

void reg_split(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    struct O {
        std::string x, projection, constants, space;
        std::size_t N = 0;
        double safety = 1.05;
    };
    auto o = std::make_shared<O>();
    auto* s = app.add_subcommand("split", "Split x into a small-ratio and a large-ratio part");
    s->add_option("--x", o->x, "vector document")->required();
    s->add_option("--projection", o->projection, "operator document")->required();
    s->add_option("--constants", o->constants, "{\"delta\", \"c\", \"eps\"} and optionally normP, normP2")
        ->required();
    s->add_option("--N", o->N, "head length; x must be supported past N")->required();
    s->add_option("--space", o->space, "space document, when the vector does not carry one");
    s->add_option("--safety", o->safety, "factor on a sampled X_{p,w} norm estimate")->check(CLI::Range(1.0, 1e6));
    add(leaves, s, "split", [o, &L, &common] {
        auto P = share(load_operator(L, o->projection, "projection"));
        const json d = L.doc(o->x);
        const bool own = d.is_object() && (d.contains("space") || d.contains("p"));
        const WeightedSpace sp = own || !o->space.empty() ? L.space(d, o->space, "x") : P->space();
        const SpVector x = io::vector_from_json(pick(d, "x"), sp, "x");
        same_space(P->space(), sp, "x");
        const json kj = L.doc(o->constants);
        const double delta = io::number(kj, "delta", "constants");
        const double c = io::number(kj, "c", "constants");
        const double eps = io::number(kj, "eps", "constants");
        std::optional<double> normP, normP2;
        if (kj.contains("normP"))
            normP = io::number(kj, "normP", "constants");
        if (kj.contains("normP2"))
            normP2 = io::number(kj, "normP2", "constants");
        const std::size_t N = o->N;
        const double safety = o->safety;
        const double tol = common.tol;
        const std::uint64_t seed = common.seed;
        return Task([=] {
            OpNormOptions opts;
            opts.seed = seed;
            ProjectionNorms pn{};
            if (normP && normP2) {
                pn = {*normP, *normP2, false};
            } else {
                pn = projection_norms(*P, safety, opts);
                if (normP)
                    pn.normP = *normP;
                if (normP2)
                    pn.normP2 = *normP2;
            }
            const SplitConstants k = solve_constants(delta, c, eps, pn.normP, pn.normP2, sp.p());
            const SplitResult res = split(x, N, k, *P, tol);
            Report r;
            r.results = {{"constants", io::to_json(k)},
                         {"norms", {{"normP", pn.normP}, {"normP2", pn.normP2}, {"certified", pn.certified}}},
                         {"E_x", io::to_json(res.E_x)},
                         {"y", vec_json(res.y)},
                         {"z", vec_json(res.z)},
                         {"r_x", res.r_x},
                         {"degenerate_y", res.degenerate_y},
                         {"degenerate_z", res.degenerate_z},
                         {"sum_residual", res.sum_residual},
                         {"premise", {{"met", res.premise_met}, {"lhs", res.premise_lhs}, {"rhs", res.premise_rhs}}},
                         {"unverified_hypothesis", res.unverified_hypothesis}};
            r.results["r_y"] = res.r_y ? json(*res.r_y) : json(nullptr);
            r.results["r_z"] = res.r_z ? json(*res.r_z) : json(nullptr);
            append(r.checks, constant_checks(k), "constants:");
            // The claims are consequences of the premise; without it they
            // are reported but not asserted.
            for (auto cl : res.claims.checks) {
                if (!res.premise_met)
                    cl = Check::not_applicable(cl.name, cl.lhs, cl.relation, cl.rhs);
                r.checks.checks.push_back(std::move(cl));
            }
            return r;
        });
    });
}

// ---------------------------------------------------------------- check

std::vector<Thm13Witness> load_witnesses(const json& d, const json& constants)
{
    const json* list = nullptr;
    if (d.is_object() && d.contains("results") && d.at("results").contains("witnesses"))
        list = &d.at("results").at("witnesses");
    else if (d.is_object() && d.contains("witnesses"))
        list = &d.at("witnesses");
    std::vector<Thm13Witness> out;
    if (!list) {
        out.push_back(io::witness_from_json(d, constants));
        return out;
    }
    if (!list->is_array())
        throw io::FormatError("witnesses", "expected an array");
    for (std::size_t i = 0; i < list->size(); ++i)
        out.push_back(io::witness_from_json((*list)[i], constants, "witnesses[" + std::to_string(i) + "]"));
    return out;
}

void reg_check(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    auto* g = app.add_subcommand("check", "Evaluate one of the criteria on given data");
    g->require_subcommand(1);

    {
        struct O {
            std::string witness, constants;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("thm13", "Witness criterion: head smallness, concentration and the mass window");
        s->add_option("--witness", o->witness, "witness document, or `gen thm13` output")->required();
        s->add_option("--constants", o->constants, "overrides for c, delta, eps, eps_prime");
        add(leaves, s, "check thm13", [o, &L, &common] {
            const json k = o->constants.empty() ? json::object() : L.doc(o->constants);
            auto ws = load_witnesses(L.doc(o->witness), k);
            for (const auto& w : ws)
                validate(w);
            const double tol = common.tol;
            return Task([ws, tol] {
                Report r;
                for (std::size_t i = 0; i < ws.size(); ++i)
                    append(r.checks, check_thm13(ws[i], tol),
                           ws.size() == 1 ? "" : "w[" + std::to_string(i) + "]:");
                r.results = {{"witnesses", ws.size()}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string y, F, space;
            double rho = 0, delta = 1;
            bool normalize = false;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("proof-bounds", "Large-coefficient estimates for y supported in F");
        s->add_option("--y", o->y, "vector document")->required();
        s->add_option("--F", o->F, "index set containing supp y (default: supp y)");
        s->add_option("--space", o->space, "space document, when the vector does not carry one");
        s->add_option("--rho", o->rho, "extraction threshold")->required()->check(CLI::PositiveNumber);
        s->add_option("--delta", o->delta, "concentration constant")->check(CLI::PositiveNumber);
        s->add_flag("--normalize", o->normalize, "scale y to norm one first");
        add(leaves, s, "check proof-bounds", [o, &L, &common] {
            SpVector y = load_vector(L, o->y, o->space, "y");
            if (o->normalize) {
                if (y.is_zero())
                    throw io::FormatError("y", "cannot normalize the zero vector");
                y *= 1.0 / xp_norm(y);
            }
            const SupportSet F = o->F.empty() ? y.support() : io::set_from_json(L.doc(o->F), "F");
            const double rho = o->rho, delta = o->delta, tol = common.tol;
            return Task([y, F, rho, delta, tol] {
                Report r;
                r.checks = check_proof_bounds(y, F, rho, delta, tol);
                r.results = {{"E", io::to_json(extract_Ei(y, F, rho))}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string projection;
            std::size_t samples = 2000;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("prop12", "Sampled gain, idempotence and ratio window of a block projection");
        s->add_option("--projection", o->projection, "block system document")->required();
        s->add_option("--samples", o->samples, "number of random x");
        add(leaves, s, "check prop12", [o, &L, &common] {
            auto P = std::make_shared<BlockProjection>(load_projection(L, o->projection));
            const std::size_t n = o->samples;
            const double tol = common.tol;
            const std::uint64_t seed = common.seed;
            return Task([P, n, tol, seed] {
                const double bound = prop12_bound(P->system());
                Rng rng(derive_seed(seed, 12));
                double worst_gain = 0, worst_idem = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const SpVector x = gen::vector(rng, P->space(), std::min<std::size_t>(P->dim(), 12));
                    if (x.is_zero())
                        continue;
                    const SpVector Px = project(*P, x);
                    const double npx = xp_norm(Px);
                    worst_gain = std::max(worst_gain, npx / xp_norm(x));
                    if (npx > 0)
                        worst_idem = std::max(worst_idem, xp_norm(project(*P, Px) - Px) / npx);
                }
                Report r;
                r.checks.checks.push_back(Check::make("gain", worst_gain, R::LessEq, bound, tol));
                r.checks.checks.push_back(Check::make("idempotence", worst_idem, R::LessEq, tol));
                for (const auto& w : ratio_bounds_check(P->system())) {
                    const std::string j = std::to_string(w.j);
                    r.checks.checks.push_back(Check::make("window:lo[" + j + "]", w.lo, R::LessEq, w.r, 1e-12));
                    r.checks.checks.push_back(Check::make("window:hi[" + j + "]", w.r, R::LessEq, w.hi, 1e-12));
                }
                r.results = {{"bound", bound}, {"samples", n}, {"worst_gain", worst_gain}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string input;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("prop24", "Approximation of high-ratio vectors by a subspace");
        s->add_option("--input", o->input,
                      "{space, Z: [..], samples: [..], eps, beta, beta_prime, variant: \"b\" | \"b'\"}")
            ->required();
        add(leaves, s, "check prop24", [o, &L, &common] {
            const json d = L.doc(o->input);
            const WeightedSpace sp = L.space(d, "", "input");
            const auto Z = io::vectors_from_json(io::member(d, "Z", "input"), sp, "input.Z");
            const auto X = io::vectors_from_json(io::member(d, "samples", "input"), sp, "input.samples");
            const double eps = io::number(d, "eps", "input");
            const double beta = io::number(d, "beta", "input");
            const double beta_prime = io::number(d, "beta_prime", "input");
            Prop24Variant variant = Prop24Variant::B;
            if (d.contains("variant")) {
                const json& v = d.at("variant");
                if (v == "b'")
                    variant = Prop24Variant::BPrime;
                else if (v != "b")
                    throw io::FormatError("input.variant", "expected \"b\" or \"b'\"");
            }
            const double tol = common.tol;
            RatioSearchOptions ro;
            ro.seed = common.seed;
            return Task([=] {
                const Prop24Report p = check_prop24(Z, X, eps, beta, beta_prime, variant, tol, ro);
                Report r;
                r.checks = p.report;
                r.results = {{"evaluated", p.evaluated}, {"skipped", p.skipped}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string projection;
            double K = 1;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("mk", "M_K partition and its implication into E_{1/2K}");
        s->add_option("--projection", o->projection, "block system document")->required();
        s->add_option("--K", o->K, "functional-value bound")->required()->check(CLI::PositiveNumber);
        add(leaves, s, "check mk", [o, &L] {
            auto P = std::make_shared<BlockProjection>(load_projection(L, o->projection));
            const double K = o->K;
            return Task([P, K] {
                const MkFamily f = mk_family(K, P->system().blocks(), *P);
                Report r;
                json rows = json::array();
                for (const auto& row : f.rows) {
                    rows.push_back({{"i", row.i},
                                    {"functional", row.functional},
                                    {"rhs", row.rhs},
                                    {"concentration", row.concentration},
                                    {"in_MK", row.in_MK},
                                    {"in_E_half_K", row.in_E_half_K},
                                    {"guard", row.guard}});
                    const std::string name = "implication[" + std::to_string(row.i) + "]";
                    // Asserted only for members of M_K meeting the guard.
                    const double half = 1.0 / (2.0 * K);
                    r.checks.checks.push_back(row.in_MK && row.guard
                                                  ? Check::make(name, row.concentration, R::GreaterEq, half)
                                                  : Check::not_applicable(name, row.concentration, R::GreaterEq, half));
                }
                r.results = {{"K", K}, {"rows", rows}, {"implication_holds", f.implication_holds()}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string input;
            double safety = 1.05;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("chain", "||Qx|| <= ||Q||^{1/2} r(x)^{1/2} ||x|| / beta' for an orthogonal projection");
        s->add_option("--input", o->input, "{space, basis: [..], vectors: [..], beta_prime (default certified)}")
            ->required();
        s->add_option("--safety", o->safety, "factor on the sampled norm of Q")->check(CLI::Range(1.0, 1e6));
        add(leaves, s, "check chain", [o, &L, &common] {
            const json d = L.doc(o->input);
            const WeightedSpace sp = L.space(d, "", "input");
            auto basis = io::vectors_from_json(io::member(d, "basis", "input"), sp, "input.basis");
            if (basis.empty())
                throw io::FormatError("input.basis", "empty basis");
            const auto X = io::vectors_from_json(io::member(d, "vectors", "input"), sp, "input.vectors");
            std::optional<double> bp;
            if (d.contains("beta_prime"))
                bp = io::number(d, "beta_prime", "input");
            auto Q = std::make_shared<GramProjector>(std::move(basis));
            const double safety = o->safety;
            const std::uint64_t seed = common.seed;
            return Task([Q, X, bp, safety, seed] {
                const double beta_prime = bp ? *bp : certified_h_lower(Q->basis());
                OpNormOptions opts;
                opts.seed = seed;
                const double nq = gram_norm_for_chain(*Q, safety, opts);
                Report r;
                for (std::size_t i = 0; i < X.size(); ++i) {
                    const std::string name = "chain[" + std::to_string(i) + "]";
                    if (X[i].is_zero()) {
                        r.checks.checks.push_back(Check::not_applicable(name, 0, R::LessEq, 0));
                        continue;
                    }
                    const Prop26Chain c = prop26_chain(*Q, beta_prime, X[i], nq);
                    r.checks.checks.push_back(Check::make(name, c.lhs, R::LessEq, c.rhs, 1e-12));
                }
                r.results = {{"beta_prime", beta_prime},
                             {"beta_prime_certified", !bp},
                             {"norm_q", nq},
                             {"condition_number", Q->condition_number()}};
                return r;
            });
        });
    }
}

// ---------------------------------------------------------------- gen

void reg_gen(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    auto* g = app.add_subcommand("gen", "Generators");
    g->require_subcommand(1);
    {
        struct O {
            std::string space;
            double eps = 0, delta = 1, c = 1;
            std::size_t count = 1;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("thm13", "Witnesses of the quantitative criterion");
        s->add_option("--space", o->space, "space document")->required();
        s->add_option("--eps", o->eps, "window upper end")->required();
        s->add_option("--delta", o->delta, "concentration constant, at most 1");
        s->add_option("--c", o->c, "window constant, at least 1");
        s->add_option("--count", o->count, "number of witnesses")->check(CLI::PositiveNumber);
        add(leaves, s, "gen thm13", [o, &L, &common] {
            const WeightedSpace sp = io::space_from_json(L.doc(o->space), "space");
            const double eps = o->eps, delta = o->delta, c = o->c, tol = common.tol;
            const std::size_t count = o->count;
            const std::uint64_t seed = common.seed;
            return Task([=] {
                const auto ws = gen_thm13_witnesses(sp, c, delta, eps, count, seed);
                Report r;
                json list = json::array();
                for (std::size_t i = 0; i < ws.size(); ++i) {
                    list.push_back(io::to_json(ws[i]));
                    append(r.checks, check_thm13(ws[i], tol), "w[" + std::to_string(i) + "]:");
                }
                r.results = {{"witnesses", list}};
                return r;
            });
        });
    }
    {
        struct O {
            double delta = 0, c = 0, eps = 0, normP = 0, normP2 = 0, p = 0, safety = 1.05;
            std::string projection;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("constants", "Solve (eps', rho, alpha, beta) for the splitting");
        s->add_option("--delta", o->delta)->required();
        s->add_option("--c", o->c)->required();
        s->add_option("--eps", o->eps)->required();
        auto* np = s->add_option("--normP", o->normP, "upper bound for the X_{p,w} norm of P");
        auto* np2 = s->add_option("--normP2", o->normP2, "upper bound for the 2w norm of P");
        auto* pp = s->add_option("--p", o->p, "exponent");
        auto* pr = s->add_option("--projection", o->projection, "take p and both norms from this operator");
        pr->excludes(np)->excludes(np2)->excludes(pp);
        s->add_option("--safety", o->safety, "factor on a sampled norm estimate")->check(CLI::Range(1.0, 1e6));
        add(leaves, s, "gen constants", [o, &L, &common, np, np2, pp] {
            std::shared_ptr<LinearOperator> P;
            if (!o->projection.empty())
                P = share(load_operator(L, o->projection, "projection"));
            else if (!*np || !*np2 || !*pp)
                throw UsageError("gen constants: give --normP, --normP2 and --p, or --projection");
            const O v = *o;
            const std::uint64_t seed = common.seed;
            return Task([P, v, seed] {
                double normP = v.normP, normP2 = v.normP2, p = v.p;
                bool certified = false;
                if (P) {
                    OpNormOptions opts;
                    opts.seed = seed;
                    const ProjectionNorms pn = projection_norms(*P, v.safety, opts);
                    normP = pn.normP;
                    normP2 = pn.normP2;
                    p = P->space().p();
                    certified = pn.certified;
                }
                const SplitConstants k = solve_constants(v.delta, v.c, v.eps, normP, normP2, p);
                Report r;
                r.checks = constant_checks(k);
                r.results = {{"constants", io::to_json(k)}, {"norms_certified", certified}};
                return r;
            });
        });
    }
}

// ---------------------------------------------------------------- classify, diag

void reg_classify(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    auto* g = app.add_subcommand("classify", "Subspace classification");
    g->require_subcommand(1);
    struct O {
        std::string vectors, space;
        double C = 1;
        std::size_t N = 0;
    };
    auto o = std::make_shared<O>();
    auto* s = g->add_subcommand("kp", "ell2-like, ellp-like or mixed span");
    s->add_option("--vectors", o->vectors, "{space, vectors: [..]}")->required();
    s->add_option("--space", o->space, "space document, when the input does not carry one");
    s->add_option("--C", o->C, "ratio threshold")->required()->check(CLI::PositiveNumber);
    s->add_option("--N", o->N, "head length for the tail family");
    add(leaves, s, "classify kp", [o, &L, &common] {
        const json d = L.doc(o->vectors);
        const WeightedSpace sp = L.space(d, o->space, "vectors");
        const auto V = io::vectors_from_json(pick(d, "vectors"), sp, "vectors");
        if (V.empty())
            throw io::FormatError("vectors", "empty family");
        const double C = o->C;
        const std::size_t N = o->N;
        RatioSearchOptions ro;
        ro.seed = common.seed;
        return Task([V, C, N, ro] {
            const KpResult k = kp_classify(V, C, N, ro);
            Report r;
            r.results = {{"class", to_string(k.cls)}, {"h_inf", k.h_inf}, {"tail_count", k.tail_count}};
            r.results["r_sup_tail"] = k.r_sup_tail ? json(*k.r_sup_tail) : json(nullptr);
            r.rows.push_back({"h_inf", k.h_inf, C});
            if (k.r_sup_tail)
                r.rows.push_back({"r_sup_tail", *k.r_sup_tail, C});
            return r;
        });
    });
}

void reg_diag(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    auto* g = app.add_subcommand("diag", "Finite-window diagnostics (reported, not asserted)");
    g->require_subcommand(1);
    struct O {
        std::string input;
        double K = 1;
        std::size_t window = 4;
    };
    auto o = std::make_shared<O>();
    auto* s = g->add_subcommand("prop21", "Projection lower-bound surrogates on the last window of a sequence");
    s->add_option("--input", o->input, "{projection: block system, u: [..], w: [..]}")->required();
    s->add_option("--K", o->K, "norm constant")->required()->check(CLI::PositiveNumber);
    s->add_option("--window", o->window, "number of trailing entries")->check(CLI::PositiveNumber);
    add(leaves, s, "diag prop21", [o, &L, &common] {
        const json d = L.doc(o->input);
        auto P = std::make_shared<BlockProjection>(
            io::projection_from_json(io::member(d, "projection", "input"), "input.projection"));
        const auto u = io::vectors_from_json(io::member(d, "u", "input"), P->space(), "input.u");
        const auto w = io::vectors_from_json(io::member(d, "w", "input"), P->space(), "input.w");
        if (u.empty() || u.size() != w.size())
            throw io::FormatError("input", "u and w must be nonempty and of equal length");
        const double K = o->K;
        const std::size_t window = o->window;
        OpNormOptions on;
        on.seed = common.seed;
        RatioSearchOptions ro;
        ro.seed = common.seed;
        return Task([=] {
            const Prop21Report p = prop21_diagnostic(u, w, *P, K, window, on, ro);
            Report r;
            r.results = {{"beta_hat", p.beta_hat},
                         {"opnorm_lower", p.opnorm_lower},
                         {"window_ratios", p.window_ratios},
                         {"window_begin", p.window_begin}};
            r.results["beta_hat_prime"] = p.beta_hat_prime ? json(*p.beta_hat_prime) : json(nullptr);
            r.results["bound"] = p.bound ? json(*p.bound) : json(nullptr);
            r.results["eps_threshold"] = p.eps_threshold ? json(*p.eps_threshold) : json(nullptr);
            for (std::size_t i = 0; i < p.window_ratios.size(); ++i)
                r.rows.push_back({"ratio[" + std::to_string(p.window_begin + i) + "]", p.window_ratios[i],
                                  p.bound.value_or(0.0)});
            return r;
        });
    });
}

// ---------------------------------------------------------------- experiment

void reg_experiment(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    auto* g = app.add_subcommand("experiment", "Seeded experiments");
    g->require_subcommand(1);
    {
        struct O {
            std::string input;
            double alpha = 1, p = 4, eta = 0.1;
            std::size_t samples = 200, D = 1024, from = 512, m = 4;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("defect", "Worst relative distance of low-ratio vectors from span Y");
        s->add_option("--input", o->input, "{space, Y: [..], candidates: [..]}; default: perturbed basis");
        s->add_option("--alpha", o->alpha, "ratio bound on sampled x")->check(CLI::PositiveNumber);
        s->add_option("--samples", o->samples, "number of sampled x");
        s->add_option("--p", o->p, "exponent of the default family")->check(CLI::Range(2.0001, 1e6));
        s->add_option("--D", o->D, "truncation of the default family")->check(CLI::PositiveNumber);
        s->add_option("--from", o->from, "perturbed basis starts past this index");
        s->add_option("--m", o->m, "length of the perturbed basis")->check(CLI::PositiveNumber);
        s->add_option("--eta", o->eta, "perturbation size");
        add(leaves, s, "experiment defect", [o, &L, &common] {
            std::vector<SpVector> Y, cand;
            if (!o->input.empty()) {
                const json d = L.doc(o->input);
                const WeightedSpace sp = L.space(d, "", "input");
                Y = io::vectors_from_json(io::member(d, "Y", "input"), sp, "input.Y");
                if (d.contains("candidates"))
                    cand = io::vectors_from_json(d.at("candidates"), sp, "input.candidates");
            } else {
                const WeightedSpace sp(o->p, generate(default_experiment_family(o->p, o->D)));
                Y = perturbed_basic_sequence(sp, o->from, o->m, o->eta);
            }
            if (Y.empty())
                throw io::FormatError("input.Y", "empty family");
            const double alpha = o->alpha;
            const std::size_t samples = o->samples;
            const std::uint64_t seed = common.seed;
            return Task([Y, cand, alpha, samples, seed] {
                const DefectResult res = defect_experiment(Y, alpha, samples, seed, cand);
                Report r;
                r.results = {{"worst_defect", res.worst_defect},
                             {"evaluated", res.evaluated},
                             {"alpha", alpha},
                             {"family_size", Y.size()}};
                r.results["witness"] = res.evaluated ? vec_json(res.witness) : json(nullptr);
                r.rows.push_back({"worst_defect", res.worst_defect, 1.0});
                return r;
            });
        });
    }
    {
        struct O {
            int criterion = 0;
            std::string repro_dir = ".";
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("acceptance", "Run one acceptance property suite");
        s->add_option("--criterion", o->criterion, "criterion number")
            ->required()
            ->check(CLI::Range(suite::kFirstCriterion, suite::kLastCriterion));
        s->add_option("--repro-dir", o->repro_dir, "where counterexample files go");
        add(leaves, s, "experiment acceptance", [o, &L, &common] {
            suite::Options so;
            so.seed = common.seed;
            so.repro_dir = L.resolve(o->repro_dir);
            const int k = o->criterion;
            return Task([k, so] {
                const suite::Outcome oc = suite::run_criterion(k, so);
                Report r;
                json stats = json::object();
                for (const auto& st : oc.stats) {
                    stats[st.name] = st.value;
                    r.rows.push_back({st.name, st.value, 0.0});
                }
                r.results = {{"criterion", oc.criterion}, {"title", oc.title}, {"stats", stats}, {"notes", oc.notes}};
                r.checks.checks.push_back(
                    Check::make("criterion " + std::to_string(k), oc.pass ? 1.0 : 0.0, R::Equal, 1.0));
                return r;
            });
        });
    }
}

// ---------------------------------------------------------------- weights

void reg_weights(CLI::App& app, const Loader& L, const Common&, std::vector<Leaf>& leaves)
{
    auto* g = app.add_subcommand("weights", "Weight families");
    g->require_subcommand(1);
    {
        struct O {
            std::string family;
            std::size_t D = 0;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("gen", "Generate a weight list");
        s->add_option("--family", o->family, "weight family document")->required();
        s->add_option("--D", o->D, "truncation (overrides the family's)");
        add(leaves, s, "weights gen", [o, &L] {
            WeightFamily f = io::family_from_json(L.doc(o->family), "family");
            if (o->D)
                f.D = o->D;
            return Task([f] {
                Report r;
                const auto w = generate(f);
                r.results = {{"family", io::to_json(f)}, {"weights", w}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string family;
            double p = 4;
            std::vector<double> eps;
            std::vector<std::size_t> D;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("diag", "Partial sums of the small-weight mass series across doublings");
        s->add_option("--family", o->family, "weight family document")->required();
        s->add_option("--p", o->p, "exponent")->check(CLI::Range(2.0001, 1e6));
        s->add_option("--eps", o->eps, "one or more thresholds")->required()->check(CLI::PositiveNumber);
        s->add_option("--D", o->D, "truncations (default: the family's D)");
        add(leaves, s, "weights diag", [o, &L] {
            const WeightFamily f = io::family_from_json(L.doc(o->family), "family");
            std::vector<std::size_t> Ds = o->D;
            if (Ds.empty())
                Ds.push_back(f.D);
            const double p = o->p;
            const auto eps = o->eps;
            return Task([f, Ds, p, eps] {
                Report r;
                json tables = json::array();
                for (double e : eps) {
                    const RosenthalDiagnostic dg = rosenthal_diagnostic(f, p, e, Ds);
                    json rows = json::array();
                    for (const auto& row : dg.rows) {
                        json jr = {{"D", row.D}, {"S", row.S}, {"S_doubled", row.S_doubled},
                                   {"diverging", row.diverging}};
                        jr["growth"] = row.growth ? json(*row.growth) : json(nullptr);
                        rows.push_back(std::move(jr));
                        r.rows.push_back({"S(" + std::to_string(e) + "," + std::to_string(row.D) + ")", row.S,
                                          row.S_doubled});
                    }
                    tables.push_back({{"eps", e}, {"rows", rows}});
                }
                r.results = {{"p", p}, {"threshold", kDivergenceThreshold}, {"tables", tables}};
                return r;
            });
        });
    }
    {
        struct O {
            std::string projection;
        };
        auto o = std::make_shared<O>();
        auto* s = g->add_subcommand("induced", "Induced weights w'_j = omega(E_j)^{(p-2)/2p} of a block system");
        s->add_option("--projection", o->projection, "block system document")->required();
        add(leaves, s, "weights induced", [o, &L] {
            auto P = std::make_shared<BlockProjection>(load_projection(L, o->projection));
            return Task([P] {
                Report r;
                r.results = {{"induced_weights", induced_weights(P->system())}};
                return r;
            });
        });
    }
}

// ---------------------------------------------------------------- batch

void reg_batch(CLI::App& app, const Loader& L, const Common&, std::vector<Leaf>& leaves)
{
    struct O {
        std::string config;
    };
    auto o = std::make_shared<O>();
    auto* s = app.add_subcommand("batch", "Run a list of command lines; all are validated before any runs");
    s->add_option("--config", o->config, "{\"runs\": [{\"name\": .., \"args\": [..]}]}")->required();
    add(leaves, s, "batch", [o, &L] {
        const fs::path path = L.resolve(o->config);
        const json d = io::read_file(path);
        const json& runs = io::member(d, "runs", "config");
        if (!runs.is_array())
            throw io::FormatError("config.runs", "expected an array");
        struct Run {
            std::string name;
            Prepared prepared;
        };
        std::vector<Run> list;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const std::string where = "config.runs[" + std::to_string(i) + "]";
            const json& rj = runs[i];
            const json& aj = io::member(rj, "args", where);
            if (!aj.is_array())
                throw io::FormatError(where + ".args", "expected an array of strings");
            std::vector<std::string> args;
            for (const auto& a : aj) {
                if (!a.is_string())
                    throw io::FormatError(where + ".args", "expected an array of strings");
                args.push_back(a.get<std::string>());
            }
            if (!args.empty() && args.front() == "batch")
                throw io::FormatError(where + ".args", "nested batch runs are not supported");
            const std::string name = rj.contains("name") && rj.at("name").is_string()
                                         ? rj.at("name").get<std::string>()
                                         : "run" + std::to_string(i);
            std::ostringstream sink;
            std::optional<Prepared> p;
            try {
                p = prepare(args, path.parent_path(), sink, sink);
            } catch (const std::exception& e) {
                throw io::FormatError(where, e.what());
            }
            if (!p)
                throw io::FormatError(where + ".args", "help and version requests cannot be batched");
            list.push_back({name, std::move(*p)});
        }
        auto shared = std::make_shared<std::vector<Run>>(std::move(list));
        return Task([shared] {
            Report r;
            json results = json::array();
            std::size_t passed = 0, failed = 0, errors = 0;
            for (const auto& run : *shared) {
                std::ostringstream out, err;
                const Outcome oc = execute(run.prepared, out, err);
                json entry = {{"name", run.name}, {"args", run.prepared.args}, {"exit", oc.exit}};
                if (oc.exit == kExitUsage)
                    entry["error"] = err.str();
                else
                    entry["report"] = oc.report;
                results.push_back(std::move(entry));
                (oc.exit == kExitOk ? passed : oc.exit == kExitCheckFailed ? failed : errors)++;
                r.checks.checks.push_back(Check::make(run.name, oc.exit, R::Equal, kExitOk));
            }
            r.results = {{"runs", results}, {"passed", passed}, {"failed", failed}, {"errors", errors}};
            return r;
        });
    });
}

} // namespace

void register_commands(CLI::App& app, const Loader& L, const Common& common, std::vector<Leaf>& leaves)
{
    reg_norm(app, L, common, leaves);
    reg_blocks(app, L, common, leaves);
    reg_project(app, L, common, leaves);
    reg_opnorm(app, L, common, leaves);
    reg_split(app, L, common, leaves);
    reg_check(app, L, common, leaves);
    reg_gen(app, L, common, leaves);
    reg_classify(app, L, common, leaves);
    reg_diag(app, L, common, leaves);
    reg_experiment(app, L, common, leaves);
    reg_weights(app, L, common, leaves);
    reg_batch(app, L, common, leaves);
}

} // namespace xplab::cli::detail
