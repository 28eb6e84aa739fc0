#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glow/llm_gateway.hpp"

// Exact and hierarchical match scoring through an LLM judge.
namespace glow::judge {

struct Verdict {
    bool em = false;
    bool hm = false;
    /// Set when the judge answer was unusable and EM was computed locally.
    bool fallback = false;

    bool operator==(const Verdict&) const = default;
};

using Pair = std::pair<std::string, std::string>;  // (predicted, gold)

/// Lowercase, drop everything but letters, digits and spaces, collapse and
/// trim whitespace. Bytes >= 0x80 count as letters so non-ASCII names survive.
std::string normalize(std::string_view text);

bool exact_match(std::string_view predicted, std::string_view gold);

llm::Prompt judge_prompt(const std::vector<Pair>& pairs);

/// Every `[e,h]` pair of 0/1 digits in order; nullopt when nothing parses.
std::optional<std::vector<std::pair<int, int>>> parse_verdicts(std::string_view response);

struct JudgeOptions {
    std::size_t batch_size = 25;
};

/// One verdict per input pair, in input order. A batch whose answer count
/// is wrong is asked again once, then scored locally. Literal matches are
/// forced to em=true and every em implies hm.
std::vector<Verdict> judge_batch(const std::vector<Pair>& pairs, llm::ChatClient& llm,
                                 const llm::ModelSettings& model, const JudgeOptions& options = {});

}  // namespace glow::judge
