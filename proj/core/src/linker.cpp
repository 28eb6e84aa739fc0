#include "glow/linker.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "glow/sparql.hpp"
#include "glow/text.hpp"

namespace glow::linker {

namespace {

// Labels the models echo in front of the values; dropped before trimming.
constexpr std::array<std::string_view, 16> kFieldLabels = {
    "the question main entity type", "question main entity type", "question main entity", "main entity type",
    "main entity", "entity type", "entity", "prediction label", "label", "relation", "relations", "the kg name",
    "kg name", "kg", "node type", "bgp"};

std::string strip_field_label(std::string_view field) {
    auto colon = field.find(':');
    if (colon == std::string_view::npos) return std::string(field);
    auto head = text::to_lower(text::trim(field.substr(0, colon)));
    for (auto label : kFieldLabels) {
        if (head == label) return std::string(field.substr(colon + 1));
    }
    return std::string(field);
}

std::vector<std::string> split_hops(const std::string& label) {
    std::string s = label;
    for (std::string_view arrow : {"→", "=>", "->"}) {
        for (auto pos = s.find(arrow); pos != std::string::npos; pos = s.find(arrow)) s.replace(pos, arrow.size(), "\x1f");
    }
    std::vector<std::string> hops;
    for (auto& part : text::split(s, '\x1f')) {
        auto t = text::trim_punct(part);
        if (!t.empty()) hops.push_back(std::move(t));
    }
    return hops;
}

std::string strip_code_fence(std::string_view s) {
    std::string out(s);
    for (auto pos = out.find("```"); pos != std::string::npos; pos = out.find("```")) out.erase(pos, 3);
    return out;
}

bool looks_qualified(std::string_view p) { return p.find_first_of(":/#") != std::string_view::npos; }

struct LinkAnswer {
    std::string node_type;
    std::optional<kg::Bgp> value_bgp;
    kg::Bgp label_bgp;
};

LinkAnswer ask_link(const kg::KGSchema& schema, std::string_view entity_type, std::string_view entity,
                    std::string_view label, llm::ChatClient& llm, const llm::ModelSettings& model) {
    auto prompt = linking_prompt(schema, entity_type, entity, label);
    std::string failure;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto res = llm.complete(model.request(prompt.system_text, prompt.user_text));
        auto fields = numbered_fields(strip_code_fence(res.text), 3);
        if (fields[2].empty()) {
            failure = "linking answer lacks field 3: '" + res.text + "'";
            continue;
        }
        auto label_bgp = match_bgp(fields[2], schema);
        if (!label_bgp) {
            failure = "BGP '" + fields[2] + "' for '" + std::string(label) + "' is not in the schema";
            continue;
        }
        LinkAnswer out;
        out.node_type = text::trim_punct(fields[0]);
        out.label_bgp = *label_bgp;
        if (!fields[1].empty()) out.value_bgp = match_bgp(fields[1], schema);
        return out;
    }
    throw LinkingError(failure);
}

}  // namespace

Prompt understanding_prompt(std::string_view question) {
    return {"You are an an expert Entity-Extraction NLP system.",
            "Given the following question, identify 1-The question main entity type, 2- the main entity, 3- the "
            "prediction label and\n4- the KG name.\nQuestion: " +
                std::string(question) +
                "\nAnswer:\n1-Question main entity:  2-Main Entity:\n3-Prediction label: 4-KG name:"};
}

std::vector<std::string> numbered_fields(std::string_view response, int count) {
    // A marker is a field number at line start or after whitespace, followed by '-', '.' or ')'.
    struct Marker {
        int number;
        std::size_t start;  // of the marker
        std::size_t body;   // first byte after it
    };
    std::vector<Marker> markers;
    for (std::size_t i = 0; i < response.size(); ++i) {
        char c = response[i];
        if (c < '1' || c > '0' + count) continue;
        if (i > 0 && !std::isspace(static_cast<unsigned char>(response[i - 1])) && response[i - 1] != ',' &&
            response[i - 1] != ';') {
            continue;
        }
        std::size_t j = i + 1;
        while (j < response.size() && response[j] == ' ') ++j;
        if (j < response.size() && (response[j] == '-' || response[j] == '.' || response[j] == ')')) {
            // "2-3" style ranges are values, not markers.
            if (j + 1 < response.size() && std::isdigit(static_cast<unsigned char>(response[j + 1]))) continue;
            markers.push_back({c - '0', i, j + 1});
        }
    }
    std::vector<std::string> fields(count);
    for (std::size_t m = 0; m < markers.size(); ++m) {
        auto end = m + 1 < markers.size() ? markers[m + 1].start : response.size();
        auto raw = strip_field_label(response.substr(markers[m].body, end - markers[m].body));
        auto value = text::trim(raw);
        auto& slot = fields[markers[m].number - 1];
        if (slot.empty()) slot = value;
    }
    return fields;
}

std::optional<QuestionParse> parse_understanding(std::string_view response) {
    auto fields = numbered_fields(strip_code_fence(response), 4);
    for (auto& f : fields) f = text::trim_punct(f);
    if (std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return f.empty(); })) return std::nullopt;
    QuestionParse p{fields[0], fields[1], fields[2], fields[3], split_hops(fields[2])};
    if (p.hop_label_texts.empty() || p.hop_label_texts.size() > 2) return std::nullopt;
    return p;
}

QuestionParse parse_question(std::string_view question, llm::ChatClient& llm, const llm::ModelSettings& model) {
    auto prompt = understanding_prompt(question);
    std::string last;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto res = llm.complete(model.request(prompt.system_text, prompt.user_text));
        if (auto parsed = parse_understanding(res.text)) return *parsed;
        last = res.text;
    }
    throw UnderstandingError("could not read entity type, entity, label and KG from: '" + last + "'");
}

Prompt linking_prompt(const kg::KGSchema& schema, std::string_view entity_type, std::string_view entity,
                      std::string_view label) {
    auto csv = kg::schema_to_csv(schema);
    if (!csv.empty() && csv.back() == '\n') csv.pop_back();
    const std::string type(entity_type), ent(entity), lab(label);
    return {"You are an an expert knowledge graph entity-relation Linking NLP system.",
            "Given the following KG Schema in the basic graph pattern CSV format, one predicate per line:\n"
            "node type, relation, node type.\n"
            "-----------\n"
            "KG Schema:\n" +
                csv +
                "\n------------\n"
                "1- What is the node type in the schema that corresponds to " +
                ent +
                "? Return only the name.\n"
                "2- Choose from the schema the BGP (node type, relation, node type) that describes the " +
                type + " value " + ent +
                ". Return only the BGP.\n"
                "3- Choose from the schema the BGP (node type, relation, node type) that describe the " +
                type + " " + lab +
                ".\n"
                "Return only the BGP.\n"
                "------------\n"
                "Answer:\n"
                "1-\n"
                "2-\n"
                "3-"};
}

std::optional<kg::Bgp> match_bgp(std::string_view raw, const kg::KGSchema& schema) {
    std::string cleaned;
    for (char c : raw) {
        if (c == '"' || c == '\'' || c == '`' || c == '(' || c == ')' || c == '[' || c == ']' || c == '<' || c == '>') {
            continue;
        }
        cleaned += c == '\n' ? ' ' : c;
    }
    auto parts = text::split(cleaned, ',');
    if (parts.size() != 3) return std::nullopt;
    for (auto& p : parts) p = text::trim_punct(p);
    auto s = parts[0], p = parts[1], o = parts[2];
    for (auto* part : {&s, &o}) {
        if (looks_qualified(*part)) *part = std::string(text::local_name(*part));
    }
    if (looks_qualified(p)) p = std::string(text::local_name(p));
    for (const auto& b : schema.bgps) {
        if (text::iequals(b.subject_type, s) && text::iequals(b.predicate, p) && text::iequals(b.object_type, o)) {
            return b;
        }
    }
    return std::nullopt;
}

std::string resolve_entity(const kg::TripleStore& store, std::string_view entity, std::string_view entity_type,
                           bool& ambiguous) {
    ambiguous = false;
    auto typed = [&](const std::string& iri) {
        if (entity_type.empty()) return true;
        auto types = store.types_of(iri);
        return std::any_of(types.begin(), types.end(), [&](const std::string& t) { return text::iequals(t, entity_type); });
    };

    // Exact-literal SPARQL lookup over every name/label/title predicate.
    std::set<std::string> hits;
    for (std::string_view local : {"name", "label", "title"}) {
        for (const auto& pred : store.predicates_named(local)) {
            sparql::SparqlQuery q;
            q.projections.push_back({"node", std::nullopt});
            q.values.push_back({"name", {kg::Term::literal(std::string(entity))}});
            q.patterns.push_back({sparql::Variable{"node"}, kg::Term::iri(pred), sparql::Variable{"name"}});
            for (const auto& row : sparql::execute(q, store).rows) {
                if (typed(row[0].value)) hits.insert(row[0].value);
            }
        }
    }
    if (hits.empty()) {
        for (auto& iri : store.nodes_named(entity)) {
            if (typed(iri)) hits.insert(iri);
        }
    }
    if (hits.empty()) {
        auto candidates = entity_type.empty() ? std::vector<std::string>{} : store.nodes_of_type(std::string(entity_type));
        for (auto& iri : candidates) {
            if (text::iequals(text::local_name(iri), entity)) hits.insert(iri);
        }
    }
    if (hits.empty()) {
        throw EntityNotFoundError("no " + (entity_type.empty() ? std::string("node") : std::string(entity_type)) +
                                  " named '" + std::string(entity) + "' in the knowledge graph");
    }
    ambiguous = hits.size() > 1;
    return *hits.begin();
}

LinkedQuestion link(const QuestionParse& parse, const kg::KGSchema& schema, const kg::TripleStore& store,
                    llm::ChatClient& llm, const llm::ModelSettings& model) {
    if (schema.empty()) throw LinkingError("knowledge graph schema is empty");
    if (parse.hop_label_texts.empty() || parse.hop_label_texts.size() > 2) {
        throw LinkingError("questions must have one or two relation hops");
    }

    LinkedQuestion out;
    auto first = ask_link(schema, parse.entity_type_text, parse.entity_text, parse.hop_label_texts.front(), llm, model);
    out.path_bgps.push_back(first.label_bgp);
    out.entity_type = first.label_bgp.subject_type;
    if (!first.node_type.empty() && !text::iequals(first.node_type, out.entity_type)) {
        out.warnings.push_back("node type answer '" + first.node_type + "' disagrees with answer-edge BGP subject '" +
                               out.entity_type + "'; using the BGP");
    }
    if (first.value_bgp && !text::iequals(first.value_bgp->subject_type, out.entity_type)) {
        out.warnings.push_back("value BGP subject '" + first.value_bgp->subject_type +
                               "' conflicts with answer-edge BGP subject '" + out.entity_type + "'; using the answer edge");
    }

    if (parse.hop_label_texts.size() == 2) {
        const auto& mid_type = first.label_bgp.object_type;
        auto second = ask_link(schema, mid_type, parse.entity_text, parse.hop_label_texts[1], llm, model);
        if (!text::iequals(second.label_bgp.subject_type, mid_type)) {
            throw LinkingError("second hop (" + second.label_bgp.subject_type + ", " + second.label_bgp.predicate +
                               ", " + second.label_bgp.object_type + ") does not start at " + mid_type);
        }
        out.path_bgps.push_back(second.label_bgp);
    }

    for (const auto& b : out.path_bgps) out.e_path.push_back(b.predicate_iri);
    out.label_bgp = out.path_bgps.back();
    out.label_type = out.label_bgp.object_type;

    out.v_t = resolve_entity(store, parse.entity_text, out.entity_type, out.ambiguous_entity);
    out.v_t_display = store.display(out.v_t);
    if (out.ambiguous_entity) {
        out.warnings.push_back("several nodes match '" + parse.entity_text + "'; chose " + out.v_t);
        spdlog::warn("ambiguous entity '{}', chose {}", parse.entity_text, out.v_t);
    }
    return out;
}

}  // namespace glow::linker
