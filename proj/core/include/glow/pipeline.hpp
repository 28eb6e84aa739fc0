#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glow/config.hpp"
#include "glow/gnn_bridge.hpp"
#include "glow/kg_store.hpp"
#include "glow/linker.hpp"
#include "glow/llm_gateway.hpp"
#include "glow/prompt_builder.hpp"
#include "glow/retriever.hpp"
#include "glow/sparql.hpp"

// End-to-end question answering over one knowledge graph.
namespace glow {

struct KnowledgeGraph {
    std::string name;
    std::string description;
    std::string domain;
    kg::TripleStore store;
    kg::KGSchema schema;
};

/// Reads the triples file, or pulls every triple from the SPARQL endpoint.
KnowledgeGraph load_kg(const KgConfig& config);

KnowledgeGraph make_kg(std::string name, kg::TripleStore store, std::string prefix, std::string description = {},
                       std::string domain = "G");

class KgRegistry {
public:
    void add(KnowledgeGraph kg);
    /// Case-insensitive; throws Error for unknown names.
    const KnowledgeGraph& get(std::string_view name) const;
    bool contains(std::string_view name) const;

private:
    std::map<std::string, std::shared_ptr<const KnowledgeGraph>> kgs_;
};

struct Services {
    llm::ChatClient* llm = nullptr;
    llm::ModelSettings answer_model;
    gnn::CandidateSource* gnn = nullptr;  // null: no GNN service configured
};

struct AskOptions {
    int top_k = 3;
    std::size_t cap_g = 100;
    std::size_t cap_gn = 50;
    bool llm_sparql = true;
    /// Replaces the full label set in the prompt (benchmark choices).
    std::optional<std::vector<std::string>> choices;

    static AskOptions from(const PipelineConfig& p);
};

struct AskResult {
    prompt::Variant requested = prompt::Variant::basic;
    prompt::Variant used = prompt::Variant::basic;
    bool degraded = false;
    std::string degradation_reason;

    linker::QuestionParse parse;
    linker::LinkedQuestion linked;
    retriever::GeneratedQuery query;
    sparql::ResultSet query_rows;
    retriever::LabelSet labels;
    std::optional<retriever::RetrievedContext> rc;
    std::optional<gnn::CandidateSet> gnn;
    prompt::Prompt prompt;

    std::string answer;
    /// Usage of the answer call alone.
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    /// Usage over every LLM call made for the question.
    std::int64_t total_tokens = 0;
    std::chrono::milliseconds latency{0};
    std::vector<std::string> warnings;
};

/// Understanding, linking, retrieval, optional GNN call, prompt and answer.
/// N and GN fall back to Basic and G when the GNN is unset, unreachable or
/// has no model for the question pattern; `degraded` records it.
AskResult ask(std::string_view question, const KnowledgeGraph& kg, prompt::Variant variant, const Services& services,
              const AskOptions& options = {});

/// Strips whitespace, a leading "Answer:" and surrounding quotes/brackets.
std::string clean_answer(std::string_view text);

}  // namespace glow
