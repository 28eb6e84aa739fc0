#include "glow/gnn_bridge.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <set>

#include "glow/text.hpp"
#include "http.hpp"

namespace glow::gnn {

using json = nlohmann::json;

ModelKey ModelKey::make(std::string_view kg_name, std::string_view entity_type,
                        const std::vector<std::string>& edge_path) {
    ModelKey key{text::to_lower(text::trim(kg_name)), text::to_lower(text::trim(entity_type)), {}};
    for (const auto& p : edge_path) key.edge_path.push_back(text::to_lower(text::trim(p)));
    if (key.kg_name.empty() || key.entity_type.empty() || key.edge_path.empty()) {
        throw Error("model key needs a KG name, an entity type and an edge path");
    }
    for (const auto& p : key.edge_path) {
        if (p.empty()) throw Error("model key edge path has an empty predicate");
    }
    return key;
}

std::string ModelKey::canonical() const { return kg_name + "/" + entity_type + "/" + text::join(edge_path, "/"); }

std::vector<std::string> CandidateSet::labels() const {
    std::vector<std::string> out;
    for (const auto& c : candidates) out.push_back(c.label);
    return out;
}

ModelNotFoundError::ModelNotFoundError(std::string key)
    : GnnError("no GNN model for " + key), key_(std::move(key)) {}

void validate(const CandidateSet& set) {
    if (set.k < 1) throw GnnResponseError("candidate set requested with k < 1");
    if (set.candidates.size() > static_cast<std::size_t>(set.k)) {
        throw GnnResponseError("GNN returned " + std::to_string(set.candidates.size()) + " candidates for k=" +
                               std::to_string(set.k));
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < set.candidates.size(); ++i) {
        const auto& c = set.candidates[i];
        if (!std::isfinite(c.log_likelihood) || c.log_likelihood > 0.0) {
            throw GnnResponseError("log-likelihood of '" + c.label + "' is not a finite value <= 0");
        }
        if (!seen.insert(c.label).second) throw GnnResponseError("duplicate candidate label '" + c.label + "'");
        if (i == 0) continue;
        const auto& prev = set.candidates[i - 1];
        bool ordered = prev.log_likelihood > c.log_likelihood ||
                       (prev.log_likelihood == c.log_likelihood && prev.label < c.label);
        if (!ordered) {
            throw GnnResponseError("candidates out of order at '" + prev.label + "', '" + c.label + "'");
        }
    }
}

std::string predict_request_json(const ModelKey& key, std::string_view node, int k) {
    return json{{"kg", key.kg_name},
                {"entity_type", key.entity_type},
                {"edge_path", key.edge_path},
                {"node", std::string(node)},
                {"k", k}}
        .dump();
}

CandidateSet parse_predict_response(std::string_view body, int k) {
    CandidateSet out;
    out.k = k;
    try {
        auto doc = json::parse(body);
        for (const auto& c : doc.at("candidates")) {
            out.candidates.push_back({c.at("label").get<std::string>(), c.at("log_likelihood").get<double>()});
        }
    } catch (const json::exception& e) {
        throw GnnResponseError(std::string("malformed /predict response: ") + e.what());
    }
    validate(out);
    return out;
}

std::vector<ModelKey> parse_models_response(std::string_view body) {
    std::vector<ModelKey> out;
    try {
        auto doc = json::parse(body);
        const auto& list = doc.is_array() ? doc : doc.at("models");
        for (const auto& m : list) {
            out.push_back(ModelKey::make(m.at("kg").get<std::string>(), m.at("entity_type").get<std::string>(),
                                         m.at("edge_path").get<std::vector<std::string>>()));
        }
    } catch (const json::exception& e) {
        throw GnnResponseError(std::string("malformed /models response: ") + e.what());
    } catch (const GnnError&) {
        throw;
    } catch (const Error& e) {
        throw GnnResponseError(std::string("malformed /models response: ") + e.what());
    }
    return out;
}

GnnClient::GnnClient(GnnClientOptions options)
    : options_(std::move(options)), in_flight_(std::max(1, std::min(options_.max_in_flight, 1024))) {
    if (options_.endpoint.empty()) throw Error("GNN endpoint URL is not configured");
    http::parse_url(options_.endpoint);
}

namespace {

struct Slot {
    std::counting_semaphore<1024>& s;
    explicit Slot(std::counting_semaphore<1024>& sem) : s(sem) { s.acquire(); }
    ~Slot() { s.release(); }
};

}  // namespace

CandidateSet GnnClient::predict(const ModelKey& key, const std::string& node, int k) {
    if (k < 1) throw Error("top-k must be at least 1");
    const auto url = http::join(options_.endpoint, "/predict");
    http::Response res;
    {
        Slot slot(in_flight_);
        try {
            res = http::post(url, predict_request_json(key, node, k), "application/json", {}, options_.timeout);
        } catch (const http::TransportError& e) {
            throw GnnTransportError("GNN endpoint " + url + ": " + e.what());
        }
    }
    if (res.status == 404) {
        std::string marker;
        try {
            marker = json::parse(res.body).value("error", "");
        } catch (const json::exception&) {
        }
        if (marker == "model-not-found") throw ModelNotFoundError(key.canonical());
    }
    if (res.status != 200) {
        throw GnnError("GNN endpoint " + url + " returned status " + std::to_string(res.status));
    }
    return parse_predict_response(res.body, k);
}

std::vector<ModelKey> GnnClient::models() {
    const auto url = http::join(options_.endpoint, "/models");
    http::Response res;
    {
        Slot slot(in_flight_);
        try {
            res = http::get(url, {}, options_.timeout);
        } catch (const http::TransportError& e) {
            throw GnnTransportError("GNN endpoint " + url + ": " + e.what());
        }
    }
    if (res.status != 200) {
        throw GnnError("GNN endpoint " + url + " returned status " + std::to_string(res.status));
    }
    return parse_models_response(res.body);
}

}  // namespace glow::gnn
