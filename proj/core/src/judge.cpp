#include "glow/judge.hpp"

#include <spdlog/spdlog.h>

#include <cctype>
#include <regex>

namespace glow::judge {

std::string normalize(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (c < 0x80 && !std::isalnum(c)) continue;
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
    return out;
}

bool exact_match(std::string_view predicted, std::string_view gold) { return normalize(predicted) == normalize(gold); }

llm::Prompt judge_prompt(const std::vector<Pair>& pairs) {
    std::string list = "[";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) list += ", ";
        list += "[" + pairs[i].first + ", " + pairs[i].second + "]";
    }
    list += "]";
    const auto n = std::to_string(pairs.size());
    return {"You are an expert LLM-as-a-Judge system.",
            "Given the following list of predicted and true pairs of values.\n"
            "-Rank the predicted value against the true value using two metrics.\n"
            "1- Exact Match Rule: you compare the two strings after normalization and remove any special characters. "
            "report 1 if both values are literally and semantically equal and 0 otherwise.\n"
            "2- Hierarchical/Categorical Match Rule: report 1 if the predicted value is under a subcategory or "
            "hierarchically belongs to the true value or is a synonym and 0 otherwise.\n"
            "- Example:\n"
            "List of pairs: [[music, art], [painter, artist],[ football player, soccer player], [ lawyer, judge], "
            "[lawyer, player]]\n"
            "Answer: [[0,1],[0,1],[1,1],[0,1],[0,0]]\n"
            "- Question:\n"
            "-List of pairs: " +
                list +
                "\n"
                "-Note: refine each pair and return Answer for exactly " +
                n +
                " pairs without explanation.\n"
                "-Finally: make sure you return only " +
                n +
                " pair of answers.\n"
                "Answer:"};
}

std::optional<std::vector<std::pair<int, int>>> parse_verdicts(std::string_view response) {
    static const std::regex pair_re(R"(\[\s*([01])\s*,\s*([01])\s*\])");
    std::vector<std::pair<int, int>> out;
    std::string s(response);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), pair_re); it != std::sregex_iterator(); ++it) {
        out.emplace_back((*it)[1].str() == "1", (*it)[2].str() == "1");
    }
    if (out.empty()) return std::nullopt;
    return out;
}

namespace {

std::vector<Verdict> judge_one_batch(const std::vector<Pair>& pairs, llm::ChatClient& llm,
                                     const llm::ModelSettings& model) {
    auto prompt = judge_prompt(pairs);
    std::vector<Verdict> out;
    for (int attempt = 0; attempt < 2 && out.empty(); ++attempt) {
        auto parsed = parse_verdicts(llm.complete(model.request(prompt)).text);
        if (parsed && parsed->size() == pairs.size()) {
            for (auto [e, h] : *parsed) out.push_back({e == 1, h == 1, false});
        }
    }
    if (out.empty()) {
        spdlog::warn("judge answer count mismatch on {} pairs twice; scoring exact match locally", pairs.size());
        for (const auto& [pred, gold] : pairs) {
            bool em = exact_match(pred, gold);
            out.push_back({em, em, true});
        }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (exact_match(pairs[i].first, pairs[i].second)) out[i].em = true;
        if (out[i].em) out[i].hm = true;
    }
    return out;
}

}  // namespace

std::vector<Verdict> judge_batch(const std::vector<Pair>& pairs, llm::ChatClient& llm, const llm::ModelSettings& model,
                                 const JudgeOptions& options) {
    const std::size_t size = std::max<std::size_t>(1, options.batch_size);
    std::vector<Verdict> out;
    out.reserve(pairs.size());
    for (std::size_t start = 0; start < pairs.size(); start += size) {
        auto end = std::min(pairs.size(), start + size);
        auto part = judge_one_batch({pairs.begin() + start, pairs.begin() + end}, llm, model);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

}  // namespace glow::judge
