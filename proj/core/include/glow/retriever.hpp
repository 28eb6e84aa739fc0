#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "glow/error.hpp"
#include "glow/kg_store.hpp"
#include "glow/linker.hpp"
#include "glow/llm_gateway.hpp"
#include "glow/sparql.hpp"

// Query generation, candidate labels and the gold-excluded context subgraph.
namespace glow::retriever {

struct LabelSet {
    std::string label_type;
    std::vector<std::string> labels;  // frequency-descending, then lexicographic
};

/// A context triple already rendered for the prompt.
struct ContextTriple {
    std::string subject;
    std::string predicate;  // local name
    std::string object;

    auto operator<=>(const ContextTriple&) const = default;
};

struct RetrievedContext {
    std::vector<ContextTriple> triples;
    bool truncated = false;
    int source_hops = 1;
};

class UnanswerableTemplateError : public Error {
public:
    using Error::Error;
};

/// Prefix name used in generated queries: the lowercased KG name.
std::string prefix_name(std::string_view kg_name);

linker::Prompt text_to_sparql_prompt(const linker::LinkedQuestion& linked, const kg::KGSchema& schema,
                                     const kg::TripleStore& store, std::string_view kg_name);

/// VALUES on the entity's name literal, the name pattern, then one pattern
/// per e_path predicate chained through intermediate variables. Nodes
/// without a name literal are bound by IRI instead.
sparql::SparqlQuery fallback_query(const linker::LinkedQuestion& linked, const kg::KGSchema& schema,
                                   const kg::TripleStore& store, std::string_view kg_name);

struct GeneratedQuery {
    sparql::SparqlQuery query;
    bool from_llm = false;
    std::string llm_text;  // raw answer, empty without an LLM
};

/// Asks the LLM when one is given; anything outside the SPARQL subset falls
/// back to `fallback_query`.
GeneratedQuery text_to_sparql(const linker::LinkedQuestion& linked, const kg::KGSchema& schema,
                              const kg::TripleStore& store, std::string_view kg_name, llm::ChatClient* llm,
                              const llm::ModelSettings& model = {});

LabelSet get_labels(const linker::LinkedQuestion& linked, const kg::TripleStore& store);

/// 1-hop in/out triples of v_t, plus those of the nodes reached over
/// e_path[0] for 2-hop questions. Triples using an e_path predicate at any
/// of these nodes are dropped. Literal triples survive truncation first;
/// output keeps neighbour order.
RetrievedContext get_context(const linker::LinkedQuestion& linked, const kg::TripleStore& store, std::size_t cap);

/// The same selection before rendering, for audits.
std::vector<kg::Triple> context_triples(const linker::LinkedQuestion& linked, const kg::TripleStore& store,
                                        std::size_t cap, bool* truncated = nullptr);

/// `[("s","p","o"), ("s","p","o")]`; `"` and `\` are backslash-escaped.
std::string serialize_rc(const RetrievedContext& rc);

}  // namespace glow::retriever
