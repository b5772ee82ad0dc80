#pragma once

#include "xplab/blocks.hpp"
#include "xplab/criteria.hpp"
#include "xplab/operators.hpp"
#include "xplab/space.hpp"
#include "xplab/splitter.hpp"
#include "xplab/weights.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

namespace xplab::io {

using nlohmann::json;

/// Malformed input document. `field()` is the JSON path of the offending
/// member.
class FormatError : public std::runtime_error {
public:
    FormatError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

json read_file(const std::filesystem::path& path);
/// A literal JSON document when the text starts with '{' or '[', otherwise
/// a file path.
json read_inline_or_file(const std::string& text);

// --- required members, with errors naming the field
const json& member(const json& j, const std::string& key, const std::string& path);
double number(const json& j, const std::string& key, const std::string& path);
double number_or(const json& j, const std::string& key, double fallback, const std::string& path);
std::size_t count(const json& j, const std::string& key, const std::string& path);

// --- spaces and weights
json to_json(const WeightFamily& f);
WeightFamily family_from_json(const json& j, const std::string& path = "weights");

json to_json(const WeightedSpace& s);
/// {"p": 4, "weights": [..]} or {"p": 4, "weights": {"kind": .., "D": ..}}.
WeightedSpace space_from_json(const json& j, const std::string& path = "space");

// --- vectors and sets
json to_json(const SupportSet& s);
SupportSet set_from_json(const json& j, const std::string& path);

/// {"entries": [[n, v], ...]} with 1-based n.
json to_json(const SpVector& x);
/// Accepts {"entries": [[n, v], ...]}, {"dense": [...]} or a bare dense array.
SpVector vector_from_json(const json& j, const WeightedSpace& space, const std::string& path);
std::vector<SpVector> vectors_from_json(const json& j, const WeightedSpace& space, const std::string& path);

// --- blocks and operators
json to_json(const Block& b);
/// {"entries": .., "E": [..], "support": [..] (default supp z)}, or the
/// vector under "z"; unchecked. Emitted with the block's own delta and c.
Block block_from_json(const json& j, const WeightedSpace& space, double delta, double c, const std::string& path);

json to_json(const BlockSystem& sys);
/// {"space": .., "blocks": [..], "delta": .., "c": ..}; without delta and c
/// the tightest constants of the blocks are used.
BlockProjection projection_from_json(const json& j, const std::string& path = "projection");

/// {"kind" (or "type"): "block-projection" (alias "blocks", the default) |
///  "gram" | "matrix" | "identity", "space": ..}
///  gram: "basis": [vectors];  matrix: "matrix": [[row], ...];  identity: "scale".
std::unique_ptr<LinearOperator> operator_from_json(const json& j, const std::string& path = "operator");

// --- criteria
json to_json(const Check& c);
json to_json(const CriterionReport& r);

json to_json(const Thm13Witness& w);
/// Constants may come from `constants` (overriding the document's own).
Thm13Witness witness_from_json(const json& j, const json& constants = json::object(),
                               const std::string& path = "witness");

json to_json(const SplitConstants& k);

} // namespace xplab::io
