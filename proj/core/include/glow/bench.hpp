#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "glow/error.hpp"
#include "glow/judge.hpp"
#include "glow/pipeline.hpp"
#include "glow/prompt_builder.hpp"

// Benchmark suites: building, running and aggregating.
namespace glow::bench {

struct MccBucket {
    std::string name;  // "2-4", ..., "32+"
    std::size_t min = 0;
    std::size_t max = 0;  // inclusive; "32+" is capped at 40
};

/// Throws Error for anything but 2-4, 4-8, 8-16, 16-32, 32+.
MccBucket mcc_bucket(std::string_view name);
const std::vector<MccBucket>& mcc_buckets();

struct BenchmarkRecord {
    std::string id;
    std::string template_id;
    std::string kg_name;
    std::string question_text;
    std::string entity_type;
    std::string entity_name;
    std::string entity_iri;
    std::vector<std::string> edge_path;  // predicate local names
    std::string gold_answer;
    std::vector<std::string> choices;
    int hops = 1;
    std::string domain_tag;  // DS | E | G
    std::size_t class_count = 0;
    std::string mcc_bucket;

    bool operator==(const BenchmarkRecord&) const = default;
};

class RecordError : public Error {
public:
    using Error::Error;
};

std::string to_json_line(const BenchmarkRecord& r);
/// Validates the record invariants (gold in choices, bucket bounds, hops).
BenchmarkRecord record_from_json(std::string_view line);
std::vector<BenchmarkRecord> read_suite(const std::string& path);
void write_suite(const std::string& path, const std::vector<BenchmarkRecord>& records);

struct QuestionTemplate {
    std::string template_id;
    std::string kg_name;
    std::string domain;
    std::string entity_type;
    std::vector<std::string> edge_path;
    std::string label_type;
    /// Placeholders: {entity}, {entity_type}, {kg}, {label_type}.
    std::string question;
    std::string mcc;

    static QuestionTemplate from_json(std::string_view text);
    static QuestionTemplate from_file(const std::string& path);
};

class SuiteBuildError : public Error {
public:
    using Error::Error;
};

/// Portable seeded sampling; std distributions differ across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n);
    /// Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

/// Samples `n` distinct nodes of the template's type that have exactly one
/// answer at the end of the edge path and an unambiguous display name.
/// Choices are the gold plus uniformly drawn distractors, shuffled.
std::vector<BenchmarkRecord> build_suite(const KnowledgeGraph& kg, const QuestionTemplate& tmpl, std::size_t n,
                                         std::string_view mcc, std::uint64_t seed);

struct RunResult {
    std::string record_id;
    int run = 0;
    prompt::Variant variant = prompt::Variant::basic;
    prompt::Variant variant_used = prompt::Variant::basic;
    std::string predicted_text;
    std::optional<judge::Verdict> verdict;  // absent when no answer was produced
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t total_tokens = 0;
    std::int64_t latency_ms = 0;
    bool degraded = false;
    std::string degradation_reason;
    std::optional<std::string> gnn_top1;
    std::string error;
    /// Serialized context sent with the answer prompt; empty for Basic/N.
    std::string rc_text;
};

std::string to_json_line(const RunResult& r);

struct RunOptions {
    AskOptions ask;
    llm::ModelSettings judge_model;
    judge::JudgeOptions judge;
    int concurrency = 4;
    int run = 0;
};

struct RunServices {
    Services answer;
    llm::ChatClient* judge_llm = nullptr;  // null: judge with answer.llm
};

/// Runs every record; a failing record yields a RunResult carrying `error`
/// and no verdict. Results keep record order.
std::vector<RunResult> run_suite(const std::vector<BenchmarkRecord>& records, const KgRegistry& kgs,
                                 prompt::Variant variant, const RunServices& services, const RunOptions& options);

struct GroupAccuracy {
    std::string variant;
    std::string dimension;  // all | template | hops | domain | kg | mcc
    std::string key;
    std::size_t total = 0;
    std::size_t em = 0;
    std::size_t hm = 0;
    double em_accuracy = 0.0;  // percent
    double hm_accuracy = 0.0;
};

struct VariantCost {
    std::string variant;
    std::size_t results = 0;
    std::size_t errored = 0;
    std::size_t degraded = 0;
    double mean_prompt_tokens = 0.0;
    double mean_completion_tokens = 0.0;
    double mean_total_tokens = 0.0;
    double mean_latency_ms = 0.0;
};

struct Report {
    std::vector<GroupAccuracy> groups;
    std::vector<VariantCost> costs;

    const GroupAccuracy* find(std::string_view variant, std::string_view dimension, std::string_view key) const;
    std::string to_json() const;
    std::string groups_csv() const;
    std::string costs_csv() const;
};

class AggregationError : public Error {
public:
    using Error::Error;
};

/// Errored results count towards totals as misses. Token counts come from
/// the provider, or ceil(chars / 4) where it reports none.
Report aggregate(const std::vector<RunResult>& results, const std::vector<BenchmarkRecord>& records);

}  // namespace glow::bench
