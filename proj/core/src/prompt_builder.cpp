#include "glow/prompt_builder.hpp"

#include <cctype>

#include "glow/text.hpp"

namespace glow::prompt {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::basic: return "basic";
        case Variant::g: return "g";
        case Variant::n: return "n";
        case Variant::gn: return "gn";
    }
    return "basic";
}

Variant parse_variant(std::string_view text) {
    auto s = text::to_lower(text::trim(text));
    if (s.rfind("glow-", 0) == 0) s = s.substr(5);
    if (s == "basic" || s == "l") return Variant::basic;
    if (s == "g") return Variant::g;
    if (s == "n") return Variant::n;
    if (s == "gn") return Variant::gn;
    throw Error("unknown prompt variant '" + std::string(text) + "' (expected basic, g, n or gn)");
}

std::string plural(std::string_view noun) {
    std::string s(noun);
    if (s.empty()) return s;
    char last = s.back();
    if (last == 's' || last == 'S') return s;
    if ((last == 'y' || last == 'Y') && s.size() > 1 &&
        std::string_view("aeiouAEIOU").find(s[s.size() - 2]) == std::string_view::npos) {
        s.pop_back();
        return s + (last == 'Y' ? "IES" : "ies");
    }
    return s + "s";
}

std::string label_name(const linker::LinkedQuestion& linked) {
    if (linked.label_type.empty() || linked.label_type == kg::kLiteralType || linked.label_type == kg::kUntyped) {
        return linked.label_bgp.predicate;
    }
    return linked.label_type;
}

Prompt build(Variant variant, std::string_view question, const linker::LinkedQuestion& linked,
             const retriever::LabelSet& labels, const retriever::RetrievedContext* rc,
             const gnn::CandidateSet* gnn, std::string_view kg_description) {
    if (uses_context(variant) && !rc) {
        throw BuildError("variant " + std::string(to_string(variant)) + " needs a retrieved context");
    }
    if (uses_gnn(variant) && (!gnn || gnn->candidates.empty())) {
        throw BuildError("variant " + std::string(to_string(variant)) + " needs at least one GNN candidate");
    }
    if (labels.labels.empty()) throw BuildError("label list is empty");

    Prompt p;
    p.variant = variant;
    p.ingredients.question = std::string(question);
    p.ingredients.v_t_display = linked.v_t_display.empty() ? std::string(text::local_name(linked.v_t)) : linked.v_t_display;
    p.ingredients.e_path = linked.e_path;
    p.ingredients.labels = labels.labels;

    const auto label = label_name(linked);
    p.system_text = "You are an expert open world question answering system.";
    std::string u = "What is the " + label + " of the " + linked.entity_type + " " + p.ingredients.v_t_display +
                    " from the " + std::string(kg_description) + " knowledge graph.\n";
    u += "- Do not return any context or analysis.\n";
    u += "- Help: The possible list of " + plural(label) + " are: [" + text::join(labels.labels, ",") + "]\n";
    if (variant == Variant::n) {
        p.ingredients.gnn_answers = gnn->labels();
        u += "- Verify the following list of GNN Answers: [" + text::join(*p.ingredients.gnn_answers, ",") + "]\n";
    } else if (variant == Variant::gn) {
        p.ingredients.gnn_answers = std::vector<std::string>{gnn->candidates.front().label};
        u += "- Verify the following GNN Answer: [" + gnn->candidates.front().label + "]\n";
    }
    if (uses_context(variant)) {
        p.ingredients.rc_text = retriever::serialize_rc(*rc);
        u += "- The " + linked.entity_type + " associated triples.\n" + *p.ingredients.rc_text + "\n";
    }
    u += "Answer:";
    p.user_text = std::move(u);
    return p;
}

}  // namespace glow::prompt
