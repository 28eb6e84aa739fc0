#pragma once

#include <chrono>
#include <compare>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "glow/error.hpp"

// Client side of the GNN inference API.
//
//   POST /predict {"kg", "entity_type", "edge_path": [...], "node", "k"}
//     200 -> {"candidates": [{"label", "log_likelihood"}, ...]}
//     404 -> {"error": "model-not-found", "key": "<canonical key>"}
//   GET /models -> {"models": [{"kg", "entity_type", "edge_path"}, ...]}
namespace glow::gnn {

/// Identifies one trained model: lowercase components, path of predicate local names.
struct ModelKey {
    std::string kg_name;
    std::string entity_type;
    std::vector<std::string> edge_path;

    /// Lowercases every component; throws Error when one is empty.
    static ModelKey make(std::string_view kg_name, std::string_view entity_type,
                         const std::vector<std::string>& edge_path);

    /// "biokg/drug/kingdom"
    std::string canonical() const;

    auto operator<=>(const ModelKey&) const = default;
};

struct Candidate {
    std::string label;
    double log_likelihood = 0.0;

    bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
    std::vector<Candidate> candidates;
    int k = 0;

    std::vector<std::string> labels() const;
};

class GnnError : public Error {
public:
    using Error::Error;
};

class ModelNotFoundError : public GnnError {
public:
    explicit ModelNotFoundError(std::string key);
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class GnnTransportError : public GnnError {
public:
    using GnnError::GnnError;
};

/// Well-formed HTTP exchange whose content breaks the contract.
class GnnResponseError : public GnnError {
public:
    using GnnError::GnnError;
};

/// Throws GnnResponseError unless |candidates| <= k, every log-likelihood
/// is finite and <= 0, labels are distinct, and the order is strictly
/// descending by log-likelihood with ascending labels on ties.
void validate(const CandidateSet& set);

std::string predict_request_json(const ModelKey& key, std::string_view node, int k);
CandidateSet parse_predict_response(std::string_view body, int k);
std::vector<ModelKey> parse_models_response(std::string_view body);

class CandidateSource {
public:
    virtual ~CandidateSource() = default;
    virtual CandidateSet predict(const ModelKey& key, const std::string& node, int k) = 0;
    virtual std::vector<ModelKey> models() = 0;
};

struct GnnClientOptions {
    std::string endpoint;  // base URL, e.g. http://127.0.0.1:8600
    std::chrono::milliseconds timeout{10'000};
    int max_in_flight = 4;
};

class GnnClient : public CandidateSource {
public:
    explicit GnnClient(GnnClientOptions options);

    /// k must be >= 1. Responses are validated before they are returned.
    CandidateSet predict(const ModelKey& key, const std::string& node, int k) override;
    std::vector<ModelKey> models() override;

private:
    GnnClientOptions options_;
    std::counting_semaphore<1024> in_flight_;
};

}  // namespace glow::gnn
