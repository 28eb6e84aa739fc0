#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glow/error.hpp"
#include "glow/gnn_bridge.hpp"
#include "glow/linker.hpp"
#include "glow/llm_gateway.hpp"
#include "glow/retriever.hpp"

// Answer prompts: Basic, G (context triples), N (GNN candidates), GN (both).
namespace glow::prompt {

enum class Variant { basic, g, n, gn };

std::string_view to_string(Variant v);

/// Accepts basic|l|g|n|gn, optionally prefixed with "glow-", any case.
Variant parse_variant(std::string_view text);

constexpr bool uses_context(Variant v) { return v == Variant::g || v == Variant::gn; }
constexpr bool uses_gnn(Variant v) { return v == Variant::n || v == Variant::gn; }

/// Variant actually run when GNN candidates are unavailable.
constexpr Variant without_gnn(Variant v) {
    return v == Variant::gn ? Variant::g : v == Variant::n ? Variant::basic : v;
}

struct Ingredients {
    std::string question;
    std::string v_t_display;
    std::vector<std::string> e_path;
    std::vector<std::string> labels;
    std::optional<std::string> rc_text;
    std::optional<std::vector<std::string>> gnn_answers;
};

struct Prompt {
    std::string system_text;
    std::string user_text;
    Variant variant = Variant::basic;
    Ingredients ingredients;

    llm::Prompt chat() const { return {system_text, user_text}; }
};

class BuildError : public Error {
public:
    using Error::Error;
};

/// "Kingdom" -> "Kingdoms", "Category" -> "Categories", "Species" unchanged.
std::string plural(std::string_view noun);

/// Name shown for the label: the label type, or the predicate local name
/// when the answer edge ends in a literal or untyped node.
std::string label_name(const linker::LinkedQuestion& linked);

/// Throws BuildError when G/GN lack a context or N/GN lack candidates.
Prompt build(Variant variant, std::string_view question, const linker::LinkedQuestion& linked,
             const retriever::LabelSet& labels, const retriever::RetrievedContext* rc,
             const gnn::CandidateSet* gnn, std::string_view kg_description);

}  // namespace glow::prompt
