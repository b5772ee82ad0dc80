#include "xplab/json_io.hpp"

#include "xplab/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace xplab::io {

namespace {

std::string sub(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string idx(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

double as_number(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw FormatError(path, "expected a number");
    return j.get<double>();
}

std::size_t as_index(const json& j, const std::string& path)
{
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw FormatError(path, "expected a nonnegative integer");
    const auto v = j.get<std::int64_t>();
    if (v < 0)
        throw FormatError(path, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
}

// Non-finite doubles become strings so that reports stay valid JSON.
json num(double v)
{
    if (std::isfinite(v))
        return v;
    if (std::isnan(v))
        return "nan";
    return v > 0 ? "inf" : "-inf";
}

} // namespace

json read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError(path.string(), "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string(), std::string("malformed JSON: ") + e.what());
    }
}

json read_inline_or_file(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw FormatError("<inline>", std::string("malformed JSON: ") + e.what());
        }
    }
    return read_file(text);
}

const json& member(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object())
        throw FormatError(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end())
        throw FormatError(sub(path, key), "missing");
    return *it;
}

double number(const json& j, const std::string& key, const std::string& path)
{
    return as_number(member(j, key, path), sub(path, key));
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& path)
{
    if (!j.is_object() || !j.contains(key))
        return fallback;
    return as_number(j.at(key), sub(path, key));
}

std::size_t count(const json& j, const std::string& key, const std::string& path)
{
    return as_index(member(j, key, path), sub(path, key));
}

json to_json(const WeightFamily& f)
{
    json j{{"kind", to_string(f.kind)}, {"D", f.D}};
    switch (f.kind) {
    case WeightKind::Constant: j["value"] = f.value; break;
    case WeightKind::PowerLaw: j["a"] = f.a; break;
    case WeightKind::Geometric: j["ratio"] = f.ratio; break;
    case WeightKind::DoublyIndexed:
        j["a"] = f.a;
        j["b"] = f.b;
        j["equal_mass"] = f.equal_mass;
        j["p"] = f.p;
        break;
    case WeightKind::Explicit: j["values"] = f.values; break;
    }
    return j;
}

WeightFamily family_from_json(const json& j, const std::string& path)
{
    if (!j.is_object())
        throw FormatError(path, "expected a weight family object");
    WeightFamily f;
    const json& kind = member(j, "kind", path);
    if (!kind.is_string())
        throw FormatError(sub(path, "kind"), "expected a string");
    try {
        f.kind = weight_kind_from_string(kind.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw FormatError(sub(path, "kind"), e.what());
    }
    f.value = number_or(j, "value", f.value, path);
    f.a = number_or(j, "a", f.a, path);
    f.ratio = number_or(j, "ratio", f.ratio, path);
    f.b = number_or(j, "b", f.b, path);
    f.p = number_or(j, "p", f.p, path);
    if (j.contains("equal_mass")) {
        if (!j.at("equal_mass").is_boolean())
            throw FormatError(sub(path, "equal_mass"), "expected a boolean");
        f.equal_mass = j.at("equal_mass").get<bool>();
    }
    if (f.kind == WeightKind::Explicit) {
        const json& vals = member(j, "values", path);
        if (!vals.is_array())
            throw FormatError(sub(path, "values"), "expected an array");
        for (std::size_t i = 0; i < vals.size(); ++i)
            f.values.push_back(as_number(vals[i], idx(sub(path, "values"), i)));
        f.D = j.contains("D") ? count(j, "D", path) : f.values.size();
    } else {
        f.D = count(j, "D", path);
    }
    return f;
}

json to_json(const WeightedSpace& s)
{
    json w = json::array();
    for (double v : s.weights())
        w.push_back(v);
    return {{"p", s.p()}, {"weights", std::move(w)}};
}

WeightedSpace space_from_json(const json& j, const std::string& path)
{
    const double p = number(j, "p", path);
    const json& w = member(j, "weights", path);
    std::vector<double> weights;
    if (w.is_array()) {
        for (std::size_t i = 0; i < w.size(); ++i)
            weights.push_back(as_number(w[i], idx(sub(path, "weights"), i)));
    } else {
        const WeightFamily f = family_from_json(w, sub(path, "weights"));
        try {
            weights = generate(f);
        } catch (const std::invalid_argument& e) {
            throw FormatError(sub(path, "weights"), e.what());
        }
    }
    try {
        return WeightedSpace(p, std::move(weights));
    } catch (const std::exception& e) {
        throw FormatError(path, e.what());
    }
}

json to_json(const SupportSet& s)
{
    return s.indices();
}

SupportSet set_from_json(const json& j, const std::string& path)
{
    if (!j.is_array())
        throw FormatError(path, "expected an array of indices");
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::size_t n = as_index(j[i], idx(path, i));
        if (n == 0)
            throw FormatError(idx(path, i), "indices are 1-based");
        v.push_back(n);
    }
    return SupportSet(std::move(v));
}

json to_json(const SpVector& x)
{
    json e = json::array();
    for (const auto& [n, v] : x.entries())
        e.push_back(json::array({n, num(v)}));
    return {{"entries", std::move(e)}};
}

SpVector vector_from_json(const json& j, const WeightedSpace& space, const std::string& path)
{
    try {
        if (j.is_array() || (j.is_object() && j.contains("dense"))) {
            const json& d = j.is_array() ? j : j.at("dense");
            const std::string dp = j.is_array() ? path : sub(path, "dense");
            if (!d.is_array())
                throw FormatError(dp, "expected an array");
            if (d.size() > space.dim())
                throw FormatError(dp, "longer than the truncation D = " + std::to_string(space.dim()));
            std::vector<double> v;
            for (std::size_t i = 0; i < d.size(); ++i)
                v.push_back(as_number(d[i], idx(dp, i)));
            return SpVector::from_dense(space, v);
        }
        const json& e = member(j, "entries", path);
        const std::string ep = sub(path, "entries");
        if (!e.is_array())
            throw FormatError(ep, "expected an array of [index, value] pairs");
        std::vector<SpVector::Entry> entries;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i].is_array() || e[i].size() != 2)
                throw FormatError(idx(ep, i), "expected [index, value]");
            entries.emplace_back(as_index(e[i][0], idx(ep, i)), as_number(e[i][1], idx(ep, i)));
        }
        return SpVector(space, std::move(entries));
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& ex) {
        throw FormatError(path, ex.what());
    }
}

std::vector<SpVector> vectors_from_json(const json& j, const WeightedSpace& space, const std::string& path)
{
    if (!j.is_array())
        throw FormatError(path, "expected an array of vectors");
    std::vector<SpVector> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(vector_from_json(j[i], space, idx(path, i)));
    return out;
}

json to_json(const Block& b)
{
    json j = to_json(b.vector());
    j["support"] = to_json(b.support());
    j["E"] = to_json(b.designated());
    j["delta"] = b.delta();
    j["c"] = b.c();
    return j;
}

Block block_from_json(const json& j, const WeightedSpace& space, double delta, double c, const std::string& path)
{
    SpVector z = j.contains("z") ? vector_from_json(j.at("z"), space, sub(path, "z")) : vector_from_json(j, space, path);
    SupportSet E = set_from_json(member(j, "E", path), sub(path, "E"));
    SupportSet S = j.contains("support") ? set_from_json(j.at("support"), sub(path, "support")) : z.support();
    try {
        return Block::unchecked(std::move(S), std::move(z), std::move(E), delta, c);
    } catch (const PreconditionError& e) {
        throw FormatError(sub(path, e.which()), e.what());
    } catch (const std::out_of_range& e) {
        throw FormatError(sub(path, "support"), e.what());
    }
}

json to_json(const BlockSystem& sys)
{
    json blocks = json::array();
    for (const auto& b : sys.blocks())
        blocks.push_back(to_json(b));
    return {{"space", to_json(sys.space())}, {"delta", sys.delta()}, {"c", sys.c()}, {"blocks", std::move(blocks)}};
}

BlockProjection projection_from_json(const json& j, const std::string& path)
{
    const WeightedSpace space = space_from_json(member(j, "space", path), sub(path, "space"));
    const json& bl = member(j, "blocks", path);
    if (!bl.is_array() || bl.empty())
        throw FormatError(sub(path, "blocks"), "expected a nonempty array of blocks");
    const bool given = j.contains("delta") || j.contains("c");
    const double delta = number_or(j, "delta", 1.0, path);
    const double c = number_or(j, "c", 1.0, path);
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < bl.size(); ++i)
        blocks.push_back(block_from_json(bl[i], space, delta, c, idx(sub(path, "blocks"), i)));
    if (!given)
        return BlockProjection(BlockSystem::with_tight_constants(std::move(blocks)));
    if (!j.contains("delta") || !j.contains("c"))
        throw FormatError(path, "give both delta and c, or neither");
    return BlockProjection(BlockSystem(std::move(blocks), delta, c));
}

std::unique_ptr<LinearOperator> operator_from_json(const json& j, const std::string& path)
{
    std::string type = "blocks";
    for (const char* key : {"type", "kind"}) {
        if (j.is_object() && j.contains(key)) {
            if (!j.at(key).is_string())
                throw FormatError(sub(path, key), "expected a string");
            type = j.at(key).get<std::string>();
        }
    }
    if (type == "blocks" || type == "block-projection")
        return std::make_unique<BlockProjection>(projection_from_json(j, path));
    const WeightedSpace space = space_from_json(member(j, "space", path), sub(path, "space"));
    if (type == "gram") {
        auto basis = vectors_from_json(member(j, "basis", path), space, sub(path, "basis"));
        if (basis.empty())
            throw FormatError(sub(path, "basis"), "empty basis");
        return std::make_unique<GramProjector>(std::move(basis));
    }
    if (type == "identity")
        return std::make_unique<MatrixOperator>(MatrixOperator::identity(space, number_or(j, "scale", 1.0, path)));
    if (type == "matrix") {
        const json& m = member(j, "matrix", path);
        const auto D = static_cast<Eigen::Index>(space.dim());
        if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != D)
            throw FormatError(sub(path, "matrix"), "expected D = " + std::to_string(D) + " rows");
        Eigen::MatrixXd M(D, D);
        for (Eigen::Index r = 0; r < D; ++r) {
            const json& row = m[static_cast<std::size_t>(r)];
            const std::string rp = idx(sub(path, "matrix"), static_cast<std::size_t>(r));
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != D)
                throw FormatError(rp, "expected D = " + std::to_string(D) + " entries");
            for (Eigen::Index c = 0; c < D; ++c)
                M(r, c) = as_number(row[static_cast<std::size_t>(c)], idx(rp, static_cast<std::size_t>(c)));
        }
        return std::make_unique<MatrixOperator>(space, std::move(M));
    }
    throw FormatError(sub(path, "type"), "unknown operator type '" + type + "'");
}

json to_json(const Check& c)
{
    return {{"name", c.name},         {"lhs", num(c.lhs)}, {"relation", to_string(c.relation)},
            {"rhs", num(c.rhs)},      {"pass", c.pass},    {"applicable", c.applicable}};
}

json to_json(const CriterionReport& r)
{
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back(to_json(c));
    return {{"checks", std::move(checks)}, {"verdict", r.verdict()}};
}

json to_json(const Thm13Witness& w)
{
    return {{"space", to_json(w.x.space())}, {"x", to_json(w.x)},       {"E", to_json(w.E)},
            {"N", w.N},                      {"c", w.c},                {"delta", w.delta},
            {"eps", w.eps},                  {"eps_prime", w.eps_prime}};
}

Thm13Witness witness_from_json(const json& j, const json& constants, const std::string& path)
{
    const WeightedSpace space = space_from_json(member(j, "space", path), sub(path, "space"));
    auto pick = [&](const std::string& key) {
        if (constants.is_object() && constants.contains(key))
            return number(constants, key, "constants");
        return number(j, key, path);
    };
    Thm13Witness w{vector_from_json(member(j, "x", path), space, sub(path, "x")),
                   set_from_json(member(j, "E", path), sub(path, "E")),
                   count(j, "N", path),
                   pick("c"),
                   pick("delta"),
                   pick("eps"),
                   pick("eps_prime")};
    return w;
}

json to_json(const SplitConstants& k)
{
    return {{"delta", k.delta}, {"c", k.c},         {"eps", k.eps},     {"normP", k.normP},
            {"normP2", k.normP2}, {"p", k.p},       {"eps_prime", k.eps_prime}, {"rho", k.rho},
            {"alpha", k.alpha}, {"beta", k.beta}};
}

} // namespace xplab::io
