#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>

#include "glow/error.hpp"
#include "glow/kg_store.hpp"
#include "glow/llm_gateway.hpp"

namespace glow {

struct KgConfig {
    std::string name;
    std::string triples;  // file path; empty when `endpoint` is used
    kg::TripleFormat format = kg::TripleFormat::ntriples;
    std::string endpoint;
    std::string prefix;
    std::string description;  // e.g. "BioKG, a Biomedical"
    std::string domain;       // DS | E | G
    std::string typing_predicate;
};

struct LlmConfig {
    std::string endpoint;  // empty: GLOW_LLM_URL
    std::string api_key_env = "GLOW_LLM_API_KEY";
    int max_attempts = 3;
    std::chrono::milliseconds timeout{120'000};
    int max_in_flight = 4;
};

struct PipelineConfig {
    int top_k = 3;
    std::size_t cap_g = 100;
    std::size_t cap_gn = 50;
    int concurrency = 4;
    /// Ask the LLM for the retrieval query; the template query is used otherwise.
    bool llm_sparql = true;
    std::size_t judge_batch = 25;
};

struct Config {
    std::map<std::string, KgConfig> kgs;  // keyed by lowercase name
    LlmConfig llm;
    llm::ModelSettings answer_model;
    llm::ModelSettings judge_model;
    std::string gnn_endpoint;  // empty: no GNN service
    std::chrono::milliseconds gnn_timeout{10'000};
    PipelineConfig pipeline;

    const KgConfig& kg(std::string_view name) const;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// INI file with [llm], [judge], [gnn], [pipeline] and one [kg.NAME] section
/// per graph. Relative triples paths resolve against `base_dir`.
Config parse_config(std::istream& in, const std::string& base_dir = ".");
Config load_config(const std::string& path);

}  // namespace glow
