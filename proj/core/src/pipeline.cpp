#include "glow/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <atomic>

#include "glow/text.hpp"

namespace glow {

namespace {

// Most common predicate namespace; stands in when no prefix is configured.
std::string infer_prefix(const kg::TripleStore& store) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : store.triples()) {
        if (store.is_typing_predicate(t.predicate.value)) continue;
        const auto& iri = t.predicate.value;
        auto local = text::local_name(iri);
        ++counts[iri.substr(0, iri.size() - local.size())];
    }
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [ns, n] : counts) {
        if (n > best_count) {
            best = ns;
            best_count = n;
        }
    }
    return best;
}

// Sums usage of every call made through it.
class MeteredClient : public llm::ChatClient {
public:
    explicit MeteredClient(llm::ChatClient& inner) : inner_(inner) {}
    llm::ChatResponse complete(const llm::ChatRequest& req) override {
        auto res = inner_.complete(req);
        tokens_ += res.prompt_tokens + res.completion_tokens;
        return res;
    }
    std::int64_t tokens() const { return tokens_; }

private:
    llm::ChatClient& inner_;
    std::atomic<std::int64_t> tokens_{0};
};

}  // namespace

KnowledgeGraph make_kg(std::string name, kg::TripleStore store, std::string prefix, std::string description,
                       std::string domain) {
    KnowledgeGraph g;
    if (prefix.empty()) prefix = infer_prefix(store);
    g.schema = kg::extract_schema(store, prefix);
    g.store = std::move(store);
    g.description = description.empty() ? name : std::move(description);
    g.name = std::move(name);
    g.domain = std::move(domain);
    return g;
}

KnowledgeGraph load_kg(const KgConfig& config) {
    kg::TripleStore store;
    if (!config.triples.empty()) {
        store = kg::load_triples_file(config.triples, config.format, config.typing_predicate);
    } else {
        auto rs = sparql::execute_remote("SELECT ?s ?p ?o WHERE { ?s ?p ?o }", config.endpoint);
        std::vector<kg::Triple> triples;
        triples.reserve(rs.rows.size());
        for (auto& row : rs.rows) {
            if (row.size() != 3 || !row[0].is_iri() || !row[1].is_iri()) continue;
            triples.push_back({std::move(row[0]), std::move(row[1]), std::move(row[2])});
        }
        store = kg::TripleStore::from_triples(std::move(triples), config.typing_predicate);
    }
    return make_kg(config.name, std::move(store), config.prefix, config.description, config.domain);
}

void KgRegistry::add(KnowledgeGraph kg) {
    auto key = text::to_lower(kg.name);
    kgs_[key] = std::make_shared<const KnowledgeGraph>(std::move(kg));
}

const KnowledgeGraph& KgRegistry::get(std::string_view name) const {
    auto it = kgs_.find(text::to_lower(name));
    if (it == kgs_.end()) throw Error("unknown knowledge graph '" + std::string(name) + "'");
    return *it->second;
}

bool KgRegistry::contains(std::string_view name) const { return kgs_.count(text::to_lower(name)) > 0; }

AskOptions AskOptions::from(const PipelineConfig& p) {
    AskOptions o;
    o.top_k = p.top_k;
    o.cap_g = p.cap_g;
    o.cap_gn = p.cap_gn;
    o.llm_sparql = p.llm_sparql;
    return o;
}

std::string clean_answer(std::string_view text) {
    auto s = text::trim(text);
    if (text::starts_with_icase(s, "answer:")) s = text::trim(s.substr(7));
    auto nl = s.find('\n');
    if (nl != std::string::npos) s = text::trim(s.substr(0, nl));
    return text::trim_punct(s);
}

AskResult ask(std::string_view question, const KnowledgeGraph& kg, prompt::Variant variant, const Services& services,
              const AskOptions& options) {
    if (!services.llm) throw Error("no LLM client configured");
    const auto start = std::chrono::steady_clock::now();
    MeteredClient llm(*services.llm);
    const auto& model = services.answer_model;

    AskResult r;
    r.requested = variant;
    r.parse = linker::parse_question(question, llm, model);
    if (!text::iequals(r.parse.kg_name, kg.name)) {
        r.warnings.push_back("question names KG '" + r.parse.kg_name + "', answering over " + kg.name);
    }
    r.linked = linker::link(r.parse, kg.schema, kg.store, llm, model);
    for (const auto& w : r.linked.warnings) r.warnings.push_back(w);

    r.query = retriever::text_to_sparql(r.linked, kg.schema, kg.store, kg.name, options.llm_sparql ? &llm : nullptr,
                                        model);
    try {
        r.query_rows = sparql::execute(r.query.query, kg.store);
    } catch (const sparql::QueryError& e) {
        r.warnings.push_back(std::string("retrieval query failed: ") + e.what());
    }
    r.labels = retriever::get_labels(r.linked, kg.store);
    if (options.choices) r.labels.labels = *options.choices;

    // GNN first: a missing model changes which context cap applies.
    r.used = variant;
    if (prompt::uses_gnn(variant)) {
        if (!services.gnn) {
            r.degradation_reason = "no GNN endpoint configured";
        } else {
            try {
                auto key = gnn::ModelKey::make(kg.name, r.linked.entity_type, [&] {
                    std::vector<std::string> path;
                    for (const auto& p : r.linked.e_path) path.emplace_back(text::local_name(p));
                    return path;
                }());
                r.gnn = services.gnn->predict(key, r.linked.v_t, options.top_k);
                if (r.gnn->candidates.empty()) {
                    r.gnn.reset();
                    r.degradation_reason = "GNN returned no candidates";
                }
            } catch (const gnn::GnnError& e) {
                r.degradation_reason = e.what();
            }
        }
        if (!r.gnn) {
            r.used = prompt::without_gnn(variant);
            r.degraded = true;
            spdlog::warn("running {} as {}: {}", prompt::to_string(variant), prompt::to_string(r.used),
                         r.degradation_reason);
        }
    }
    if (prompt::uses_context(r.used)) {
        r.rc = retriever::get_context(r.linked, kg.store, r.used == prompt::Variant::gn ? options.cap_gn : options.cap_g);
    }

    r.prompt = prompt::build(r.used, question, r.linked, r.labels, r.rc ? &*r.rc : nullptr, r.gnn ? &*r.gnn : nullptr,
                             kg.description);
    auto res = llm.complete(model.request(r.prompt.chat()));
    r.answer = clean_answer(res.text);
    r.prompt_tokens = res.prompt_tokens;
    r.completion_tokens = res.completion_tokens;
    r.total_tokens = llm.tokens();
    r.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return r;
}

}  // namespace glow
