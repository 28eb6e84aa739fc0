#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glow/error.hpp"
#include "glow/kg_store.hpp"
#include "glow/llm_gateway.hpp"

// Question understanding and entity/relation linking.
namespace glow::linker {

struct QuestionParse {
    std::string entity_type_text;
    std::string entity_text;
    std::string label_text;
    std::string kg_name;
    /// One relation phrase per hop, split from the label on "->" / "→".
    std::vector<std::string> hop_label_texts;
};

struct LinkedQuestion {
    std::string v_t;  // node IRI
    std::string v_t_display;
    std::string entity_type;
    std::vector<std::string> e_path;  // predicate IRIs, one per hop
    std::string label_type;
    kg::Bgp label_bgp;
    std::vector<kg::Bgp> path_bgps;
    std::vector<std::string> warnings;
    bool ambiguous_entity = false;

    std::size_t hops() const { return e_path.size(); }
};

class UnderstandingError : public Error {
public:
    using Error::Error;
};

class LinkingError : public Error {
public:
    using Error::Error;
};

class EntityNotFoundError : public Error {
public:
    using Error::Error;
};

using llm::Prompt;

Prompt understanding_prompt(std::string_view question);

/// Reads the numbered `1- ... 4-` answer; nullopt when a field is missing.
std::optional<QuestionParse> parse_understanding(std::string_view response);

/// Asks the LLM, retrying once on an unparseable answer.
QuestionParse parse_question(std::string_view question, llm::ChatClient& llm, const llm::ModelSettings& model);

Prompt linking_prompt(const kg::KGSchema& schema, std::string_view entity_type, std::string_view entity,
                      std::string_view label);

/// Numbered fields of a linking answer keyed by their number; missing ones are empty.
std::vector<std::string> numbered_fields(std::string_view response, int count);

/// Maps noisy BGP text such as "(drug, biokg:KINGDOM, `Kingdom`)" onto a
/// schema row: case-insensitive, quotes and brackets stripped, predicates
/// compared by local name.
std::optional<kg::Bgp> match_bgp(std::string_view text, const kg::KGSchema& schema);

/// Name/label/title lookup restricted to `entity_type`, then an IRI local
/// name match. Several hits resolve to the smallest IRI and set `ambiguous`.
std::string resolve_entity(const kg::TripleStore& store, std::string_view entity, std::string_view entity_type,
                           bool& ambiguous);

LinkedQuestion link(const QuestionParse& parse, const kg::KGSchema& schema, const kg::TripleStore& store,
                    llm::ChatClient& llm, const llm::ModelSettings& model);

}  // namespace glow::linker
