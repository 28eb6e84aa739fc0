#include "glow/retriever.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "glow/text.hpp"

namespace glow::retriever {

namespace {

std::string variable_name(std::string_view type) {
    std::string out;
    for (char c : text::to_lower(type)) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') out += c;
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "v" + out;
    return out;
}

std::string unique_variable(std::string base, std::set<std::string>& used) {
    if (used.insert(base).second) return base;
    for (int i = 2;; ++i) {
        auto cand = base + std::to_string(i);
        if (used.insert(cand).second) return cand;
    }
}

// Name literal and predicate used to pin v_t in a query; empty when v_t has no name.
std::pair<std::string, std::string> name_binding(const kg::TripleStore& store, const std::string& node) {
    for (std::string_view local : {"name", "label", "title"}) {
        std::pair<std::string, std::string> best;
        for (auto i : store.with_subject(node)) {
            const auto& t = store.triples()[i];
            if (!t.object.is_literal() || !text::iequals(text::local_name(t.predicate.value), local)) continue;
            std::pair<std::string, std::string> cand{t.predicate.value, t.object.value};
            if (best.first.empty() || cand < best) best = cand;
        }
        if (!best.first.empty()) return best;
    }
    return {};
}

std::string strip_fences(std::string_view raw) {
    std::string s(raw);
    auto open = s.find("```");
    if (open == std::string::npos) return s;
    auto body = s.find('\n', open);
    auto close = s.find("```", open + 3);
    if (body == std::string::npos || close == std::string::npos || close < body) return s.substr(open + 3);
    return s.substr(body + 1, close - body - 1);
}

std::string bgp_line(const kg::Bgp& b) { return b.subject_type + " ," + b.predicate + " ," + b.object_type; }

bool in_path(const linker::LinkedQuestion& linked, const std::string& predicate) {
    return std::find(linked.e_path.begin(), linked.e_path.end(), predicate) != linked.e_path.end();
}

}  // namespace

std::string prefix_name(std::string_view kg_name) { return variable_name(kg_name); }

linker::Prompt text_to_sparql_prompt(const linker::LinkedQuestion& linked, const kg::KGSchema& schema,
                                     const kg::TripleStore& store, std::string_view kg_name) {
    auto csv = kg::schema_to_csv(schema);
    if (!csv.empty() && csv.back() == '\n') csv.pop_back();
    auto [name_pred, name] = name_binding(store, linked.v_t);
    std::string name_local = name_pred.empty() ? "NAME" : std::string(text::local_name(name_pred));
    std::string node = name.empty() ? std::string(text::local_name(linked.v_t)) : name;

    std::string bgps = "1-  " + linked.entity_type + " ," + name_local + " ," + node;
    for (std::size_t i = 0; i < linked.path_bgps.size(); ++i) {
        bgps += "\n" + std::to_string(i + 2) + "-  " + bgp_line(linked.path_bgps[i]);
    }
    return {"You are an an expert text-To-SPARQL translation system.",
            "Given the following KG Schema in the basic graph pattern CSV format, one predicate per line:\n"
            "node type, relation, node type.\n"
            "-----------\n"
            "KG Schema:\n" +
                csv +
                "\n------------\n"
                "Write a SPARQL query that selects the " +
                linked.entity_type + " that satisfy the following BGPs.\n" + bgps + "\ngraph prefix: " +
                prefix_name(kg_name) + ": <" + schema.prefix +
                ">\n"
                "--------------------\n"
                "Answer: SPARQL Query\n"
                "Do not return any explanation or reasoning details."};
}

sparql::SparqlQuery fallback_query(const linker::LinkedQuestion& linked, const kg::KGSchema& schema,
                                   const kg::TripleStore& store, std::string_view kg_name) {
    sparql::SparqlQuery q;
    if (!schema.prefix.empty()) q.prefixes[prefix_name(kg_name)] = schema.prefix;

    std::set<std::string> used;
    auto subject = unique_variable(variable_name(linked.entity_type), used);
    auto [name_pred, name] = name_binding(store, linked.v_t);
    if (!name_pred.empty()) {
        auto name_var = unique_variable("name", used);
        q.values.push_back({name_var, {kg::Term::literal(name)}});
        q.patterns.push_back({sparql::Variable{subject}, kg::Term::iri(name_pred), sparql::Variable{name_var}});
    } else {
        q.values.push_back({subject, {kg::Term::iri(linked.v_t)}});
    }

    std::string current = subject;
    for (std::size_t i = 0; i < linked.e_path.size(); ++i) {
        bool last = i + 1 == linked.e_path.size();
        std::string next;
        if (last) {
            auto type = linked.label_type;
            if (type == kg::kLiteralType || type == kg::kUntyped) type = text::local_name(linked.e_path[i]);
            next = unique_variable(variable_name(type), used);
        } else {
            next = unique_variable("hop" + std::to_string(i + 1), used);
        }
        q.patterns.push_back({sparql::Variable{current}, kg::Term::iri(linked.e_path[i]), sparql::Variable{next}});
        current = next;
    }
    q.projections.push_back({subject, std::string("vt")});
    q.projections.push_back({current, std::string("vl")});
    return q;
}

GeneratedQuery text_to_sparql(const linker::LinkedQuestion& linked, const kg::KGSchema& schema,
                              const kg::TripleStore& store, std::string_view kg_name, llm::ChatClient* llm,
                              const llm::ModelSettings& model) {
    GeneratedQuery out;
    if (llm) {
        auto prompt = text_to_sparql_prompt(linked, schema, store, kg_name);
        try {
            out.llm_text = llm->complete(model.request(prompt.system_text, prompt.user_text)).text;
            out.query = sparql::parse(strip_fences(out.llm_text));
            out.from_llm = true;
            return out;
        } catch (const sparql::QueryError& e) {
            spdlog::warn("generated SPARQL rejected, using template query: {}", e.what());
        }
    }
    out.query = fallback_query(linked, schema, store, kg_name);
    return out;
}

LabelSet get_labels(const linker::LinkedQuestion& linked, const kg::TripleStore& store) {
    if (linked.e_path.empty()) throw UnanswerableTemplateError("question has no answer edge");
    const auto& predicate = linked.e_path.back();
    const auto& subject_type = linked.label_bgp.subject_type;

    std::map<std::string, std::size_t> counts;
    for (auto i : store.with_predicate(predicate)) {
        const auto& t = store.triples()[i];
        auto types = store.types_of(t.subject.value);
        bool typed = subject_type == kg::kUntyped
                         ? types.empty()
                         : std::find(types.begin(), types.end(), subject_type) != types.end();
        if (typed) ++counts[store.display(t.object)];
    }
    if (counts.empty()) {
        throw UnanswerableTemplateError("no " + std::string(text::local_name(predicate)) + " values on any " +
                                        subject_type + " node");
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    LabelSet out;
    out.label_type = linked.label_type;
    for (auto& [label, _] : ranked) out.labels.push_back(label);
    return out;
}

std::vector<kg::Triple> context_triples(const linker::LinkedQuestion& linked, const kg::TripleStore& store,
                                        std::size_t cap, bool* truncated) {
    std::vector<std::string> nodes{linked.v_t};
    if (linked.hops() == 2) {
        for (auto i : store.with_subject(linked.v_t)) {
            const auto& t = store.triples()[i];
            if (t.predicate.value == linked.e_path.front() && t.object.is_iri() && t.object.value != linked.v_t) {
                nodes.push_back(t.object.value);
            }
        }
        std::sort(nodes.begin() + 1, nodes.end());
        nodes.erase(std::unique(nodes.begin() + 1, nodes.end()), nodes.end());
    }

    std::vector<kg::Triple> kept;
    std::set<kg::Triple> seen;
    for (const auto& node : nodes) {
        for (auto& t : store.neighbors(node, kg::Direction::both)) {
            if (in_path(linked, t.predicate.value)) continue;
            if (seen.insert(t).second) kept.push_back(std::move(t));
        }
    }

    if (truncated) *truncated = kept.size() > cap;
    if (kept.size() <= cap) return kept;

    // Literal attributes claim the budget first; the output keeps the original order.
    std::size_t literals = std::count_if(kept.begin(), kept.end(), [](const kg::Triple& t) { return t.object.is_literal(); });
    std::size_t literal_budget = std::min(literals, cap);
    std::size_t relation_budget = cap - literal_budget;
    std::vector<kg::Triple> out;
    out.reserve(cap);
    for (auto& t : kept) {
        auto& budget = t.object.is_literal() ? literal_budget : relation_budget;
        if (budget == 0) continue;
        --budget;
        out.push_back(std::move(t));
    }
    return out;
}

RetrievedContext get_context(const linker::LinkedQuestion& linked, const kg::TripleStore& store, std::size_t cap) {
    RetrievedContext rc;
    rc.source_hops = linked.hops() == 2 ? 2 : 1;
    for (const auto& t : context_triples(linked, store, cap, &rc.truncated)) {
        rc.triples.push_back(
            {store.display(t.subject), std::string(text::local_name(t.predicate.value)), store.display(t.object)});
    }
    return rc;
}

std::string serialize_rc(const RetrievedContext& rc) {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c == '\n' ? ' ' : c;
        }
        return out + "\"";
    };
    std::string out = "[";
    for (std::size_t i = 0; i < rc.triples.size(); ++i) {
        if (i) out += ", ";
        const auto& t = rc.triples[i];
        out += "(" + quote(t.subject) + "," + quote(t.predicate) + "," + quote(t.object) + ")";
    }
    return out + "]";
}

}  // namespace glow::retriever
