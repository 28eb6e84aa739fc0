#include "glow/bench.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "glow/retriever.hpp"
#include "glow/text.hpp"

namespace glow::bench {

using json = nlohmann::json;

const std::vector<MccBucket>& mcc_buckets() {
    static const std::vector<MccBucket> buckets = {
        {"2-4", 2, 4}, {"4-8", 4, 8}, {"8-16", 8, 16}, {"16-32", 16, 32}, {"32+", 32, 40}};
    return buckets;
}

MccBucket mcc_bucket(std::string_view name) {
    auto trimmed = text::trim(name);
    for (const auto& b : mcc_buckets()) {
        if (b.name == trimmed) return b;
    }
    throw Error("unknown MCC bucket '" + std::string(name) + "' (expected 2-4, 4-8, 8-16, 16-32 or 32+)");
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below needs n > 0");
    // Rejection sampling keeps the draw uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

std::string to_json_line(const BenchmarkRecord& r) {
    return json{{"id", r.id},
                {"template_id", r.template_id},
                {"kg", r.kg_name},
                {"question", r.question_text},
                {"entity_type", r.entity_type},
                {"entity", r.entity_name},
                {"entity_iri", r.entity_iri},
                {"edge_path", r.edge_path},
                {"gold", r.gold_answer},
                {"choices", r.choices},
                {"hops", r.hops},
                {"domain", r.domain_tag},
                {"class_count", r.class_count},
                {"mcc", r.mcc_bucket}}
        .dump();
}

BenchmarkRecord record_from_json(std::string_view line) {
    BenchmarkRecord r;
    try {
        auto doc = json::parse(line);
        r.id = doc.at("id").get<std::string>();
        r.template_id = doc.at("template_id").get<std::string>();
        r.kg_name = doc.at("kg").get<std::string>();
        r.question_text = doc.at("question").get<std::string>();
        r.entity_type = doc.at("entity_type").get<std::string>();
        r.entity_name = doc.at("entity").get<std::string>();
        r.entity_iri = doc.value("entity_iri", "");
        r.edge_path = doc.at("edge_path").get<std::vector<std::string>>();
        r.gold_answer = doc.at("gold").get<std::string>();
        r.choices = doc.at("choices").get<std::vector<std::string>>();
        r.hops = doc.at("hops").get<int>();
        r.domain_tag = doc.at("domain").get<std::string>();
        r.class_count = doc.value("class_count", std::size_t{0});
        r.mcc_bucket = doc.at("mcc").get<std::string>();
    } catch (const json::exception& e) {
        throw RecordError(std::string("malformed benchmark record: ") + e.what());
    }
    const auto where = "record " + r.id + ": ";
    if (r.hops < 1 || r.hops > 2 || static_cast<std::size_t>(r.hops) != r.edge_path.size()) {
        throw RecordError(where + "hops must equal the edge path length (1 or 2)");
    }
    if (std::find(r.choices.begin(), r.choices.end(), r.gold_answer) == r.choices.end()) {
        throw RecordError(where + "gold answer '" + r.gold_answer + "' is not among the choices");
    }
    if (std::set<std::string>(r.choices.begin(), r.choices.end()).size() != r.choices.size()) {
        throw RecordError(where + "duplicate choices");
    }
    MccBucket bucket;
    try {
        bucket = mcc_bucket(r.mcc_bucket);
    } catch (const Error& e) {
        throw RecordError(where + e.what());
    }
    if (r.choices.size() < bucket.min || r.choices.size() > bucket.max) {
        throw RecordError(where + std::to_string(r.choices.size()) + " choices outside MCC bucket " + bucket.name);
    }
    return r;
}

std::vector<BenchmarkRecord> read_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open suite " + path);
    std::vector<BenchmarkRecord> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(record_from_json(line));
        } catch (const RecordError& e) {
            throw RecordError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!ids.insert(out.back().id).second) {
            throw RecordError(path + ":" + std::to_string(lineno) + ": duplicate record id " + out.back().id);
        }
    }
    return out;
}

void write_suite(const std::string& path, const std::vector<BenchmarkRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write suite " + path);
    for (const auto& r : records) out << to_json_line(r) << '\n';
}

QuestionTemplate QuestionTemplate::from_json(std::string_view text) {
    QuestionTemplate t;
    try {
        auto doc = json::parse(text);
        t.template_id = doc.at("template_id").get<std::string>();
        t.kg_name = doc.at("kg").get<std::string>();
        t.domain = doc.value("domain", "G");
        t.entity_type = doc.at("entity_type").get<std::string>();
        t.edge_path = doc.at("edge_path").get<std::vector<std::string>>();
        t.label_type = doc.at("label_type").get<std::string>();
        t.question = doc.at("question").get<std::string>();
        t.mcc = doc.value("mcc", "");
    } catch (const json::exception& e) {
        throw Error(std::string("malformed question template: ") + e.what());
    }
    if (t.edge_path.empty() || t.edge_path.size() > 2) throw Error("template edge_path must have 1 or 2 predicates");
    return t;
}

QuestionTemplate QuestionTemplate::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open template " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

namespace {

std::string fill(std::string text, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        const auto needle = "{" + key + "}";
        for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + value.size())) {
            text.replace(pos, needle.size(), value);
        }
    }
    return text;
}

bool has_type(const kg::TripleStore& store, const std::string& node, std::string_view type) {
    auto types = store.types_of(node);
    return std::find(types.begin(), types.end(), type) != types.end();
}

}  // namespace

std::vector<BenchmarkRecord> build_suite(const KnowledgeGraph& kg, const QuestionTemplate& tmpl, std::size_t n,
                                         std::string_view mcc, std::uint64_t seed) {
    const auto bucket = mcc_bucket(mcc);
    if (n == 0) return {};

    // Resolve the path against the schema.
    linker::LinkedQuestion linked;
    std::string type;
    for (const auto& b : kg.schema.bgps) {
        if (text::iequals(b.subject_type, tmpl.entity_type)) type = b.subject_type;
    }
    if (type.empty()) throw SuiteBuildError("no " + tmpl.entity_type + " nodes in the " + kg.name + " schema");
    linked.entity_type = type;
    for (const auto& local : tmpl.edge_path) {
        const kg::Bgp* hit = nullptr;
        for (const auto& b : kg.schema.bgps) {
            if (b.subject_type == type && text::iequals(b.predicate, local)) {
                hit = &b;
                break;
            }
        }
        if (!hit) throw SuiteBuildError("schema has no (" + type + ", " + local + ", *) pattern");
        linked.path_bgps.push_back(*hit);
        linked.e_path.push_back(hit->predicate_iri);
        type = hit->object_type;
    }
    linked.label_bgp = linked.path_bgps.back();
    linked.label_type = linked.label_bgp.object_type;
    const auto& store = kg.store;

    auto labels = retriever::get_labels(linked, store).labels;
    if (labels.size() < bucket.min) {
        throw SuiteBuildError(tmpl.template_id + ": only " + std::to_string(labels.size()) + " labels, bucket " +
                              bucket.name + " needs at least " + std::to_string(bucket.min));
    }

    struct Eligible {
        std::string iri;
        std::string name;
        std::string gold;
    };
    std::vector<Eligible> eligible;
    for (const auto& node : store.nodes_of_type(linked.entity_type)) {
        std::set<std::string> frontier{node};
        for (std::size_t hop = 0; hop < linked.e_path.size(); ++hop) {
            std::set<std::string> next;
            for (const auto& s : frontier) {
                for (auto i : store.with_subject(s)) {
                    const auto& t = store.triples()[i];
                    if (t.predicate.value != linked.e_path[hop]) continue;
                    if (hop + 1 < linked.e_path.size() && !t.object.is_iri()) continue;
                    if (hop + 1 < linked.e_path.size() && !has_type(store, t.object.value, linked.path_bgps[hop].object_type)) continue;
                    next.insert(hop + 1 < linked.e_path.size() ? t.object.value : store.display(t.object));
                }
            }
            frontier = std::move(next);
        }
        if (frontier.size() != 1) continue;
        auto name = store.display(node);
        std::size_t namesakes = 0;
        for (const auto& other : store.nodes_named(name)) namesakes += has_type(store, other, linked.entity_type);
        if (namesakes > 1) continue;
        eligible.push_back({node, name, *frontier.begin()});
    }
    if (eligible.size() < n) {
        throw SuiteBuildError(tmpl.template_id + ": " + std::to_string(n) + " questions requested but only " +
                              std::to_string(eligible.size()) + " " + linked.entity_type +
                              " nodes have a single unambiguous answer");
    }

    Rng rng(seed);
    rng.shuffle(eligible);
    eligible.resize(n);

    std::vector<std::string> path_locals;
    for (const auto& b : linked.path_bgps) path_locals.push_back(b.predicate);

    std::vector<BenchmarkRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = eligible[i];
        BenchmarkRecord r;
        r.id = tmpl.template_id + "-" + std::string(i < 9 ? "00" : i < 99 ? "0" : "") + std::to_string(i + 1);
        r.template_id = tmpl.template_id;
        r.kg_name = kg.name;
        r.entity_type = linked.entity_type;
        r.entity_name = e.name;
        r.entity_iri = e.iri;
        r.edge_path = path_locals;
        r.gold_answer = e.gold;
        r.hops = static_cast<int>(path_locals.size());
        r.domain_tag = tmpl.domain;
        r.class_count = labels.size();
        r.mcc_bucket = bucket.name;
        r.question_text = fill(tmpl.question, {{"entity", e.name},
                                               {"entity_type", linked.entity_type},
                                               {"kg", kg.name},
                                               {"label_type", tmpl.label_type}});

        auto size = rng.between(bucket.min, std::min<std::size_t>(bucket.max, labels.size()));
        std::vector<std::string> distractors;
        for (const auto& l : labels) {
            if (l != e.gold) distractors.push_back(l);
        }
        rng.shuffle(distractors);
        distractors.resize(size - 1);
        r.choices = std::move(distractors);
        r.choices.push_back(e.gold);
        rng.shuffle(r.choices);
        out.push_back(std::move(r));
    }
    return out;
}

std::string to_json_line(const RunResult& r) {
    json j{{"record_id", r.record_id},
           {"run", r.run},
           {"variant", prompt::to_string(r.variant)},
           {"variant_used", prompt::to_string(r.variant_used)},
           {"predicted", r.predicted_text},
           {"prompt_tokens", r.prompt_tokens},
           {"completion_tokens", r.completion_tokens},
           {"total_tokens", r.total_tokens},
           {"latency_ms", r.latency_ms},
           {"degraded", r.degraded}};
    j["verdict"] = r.verdict ? json{{"em", r.verdict->em}, {"hm", r.verdict->hm}, {"fallback", r.verdict->fallback}}
                             : json(nullptr);
    if (r.degraded) j["degradation_reason"] = r.degradation_reason;
    j["gnn_top1"] = r.gnn_top1 ? json(*r.gnn_top1) : json(nullptr);
    if (!r.error.empty()) j["error"] = r.error;
    return j.dump();
}

std::vector<RunResult> run_suite(const std::vector<BenchmarkRecord>& records, const KgRegistry& kgs,
                                 prompt::Variant variant, const RunServices& services, const RunOptions& options) {
    std::vector<RunResult> results(records.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < records.size(); i = next++) {
            const auto& rec = records[i];
            auto& out = results[i];
            out.record_id = rec.id;
            out.run = options.run;
            out.variant = variant;
            out.variant_used = variant;
            try {
                auto ask_options = options.ask;
                ask_options.choices = rec.choices;
                auto r = ask(rec.question_text, kgs.get(rec.kg_name), variant, services.answer, ask_options);
                out.variant_used = r.used;
                out.predicted_text = r.answer;
                out.prompt_tokens = r.prompt_tokens;
                out.completion_tokens = r.completion_tokens;
                out.total_tokens = r.total_tokens;
                out.latency_ms = r.latency.count();
                out.degraded = r.degraded;
                out.degradation_reason = r.degradation_reason;
                if (r.gnn && !r.gnn->candidates.empty()) out.gnn_top1 = r.gnn->candidates.front().label;
                if (r.prompt.ingredients.rc_text) out.rc_text = *r.prompt.ingredients.rc_text;
            } catch (const std::exception& e) {
                out.error = e.what();
                spdlog::warn("record {} failed: {}", rec.id, e.what());
            }
        }
    };
    const auto threads = std::max(1, std::min<int>(options.concurrency, static_cast<int>(records.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<judge::Pair> pairs;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!results[i].error.empty()) continue;
        pairs.emplace_back(results[i].predicted_text, records[i].gold_answer);
        index.push_back(i);
    }
    if (pairs.empty()) return results;
    auto* judge_llm = services.judge_llm ? services.judge_llm : services.answer.llm;
    std::vector<judge::Verdict> verdicts;
    try {
        if (!judge_llm) throw Error("no judge LLM configured");
        verdicts = judge::judge_batch(pairs, *judge_llm, options.judge_model, options.judge);
    } catch (const std::exception& e) {
        spdlog::warn("judge unavailable, scoring exact match locally: {}", e.what());
        verdicts.clear();
        for (const auto& [pred, gold] : pairs) {
            bool em = judge::exact_match(pred, gold);
            verdicts.push_back({em, em, true});
        }
    }
    for (std::size_t j = 0; j < index.size(); ++j) results[index[j]].verdict = verdicts[j];
    return results;
}

const GroupAccuracy* Report::find(std::string_view variant, std::string_view dimension, std::string_view key) const {
    for (const auto& g : groups) {
        if (g.variant == variant && g.dimension == dimension && g.key == key) return &g;
    }
    return nullptr;
}

Report aggregate(const std::vector<RunResult>& results, const std::vector<BenchmarkRecord>& records) {
    std::map<std::string, const BenchmarkRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;

    static const std::vector<std::string> dimensions = {"all", "template", "hops", "domain", "kg", "mcc"};
    struct Tally {
        std::size_t total = 0, em = 0, hm = 0;
    };
    // (variant, dimension index, key)
    std::map<std::tuple<std::string, std::size_t, std::string>, Tally> tallies;
    struct CostSum {
        std::size_t results = 0, errored = 0, degraded = 0, answered = 0;
        std::int64_t prompt = 0, completion = 0, total = 0, latency = 0;
    };
    std::map<std::string, CostSum> costs;

    for (const auto& res : results) {
        auto it = by_id.find(res.record_id);
        if (it == by_id.end()) throw AggregationError("result refers to unknown record '" + res.record_id + "'");
        const auto& rec = *it->second;
        const std::string variant(prompt::to_string(res.variant));
        const std::vector<std::string> keys = {"all",          rec.template_id, std::to_string(rec.hops),
                                               rec.domain_tag, rec.kg_name,     rec.mcc_bucket};
        for (std::size_t d = 0; d < dimensions.size(); ++d) {
            auto& t = tallies[{variant, d, keys[d]}];
            ++t.total;
            if (res.verdict) {
                t.em += res.verdict->em;
                t.hm += res.verdict->hm || res.verdict->em;
            }
        }
        auto& c = costs[variant];
        ++c.results;
        c.degraded += res.degraded;
        if (!res.error.empty()) {
            ++c.errored;
            continue;
        }
        ++c.answered;
        c.prompt += res.prompt_tokens;
        c.completion += res.completion_tokens;
        c.total += res.total_tokens;
        c.latency += res.latency_ms;
    }

    Report report;
    for (const auto& [key, t] : tallies) {
        const auto& [variant, d, k] = key;
        GroupAccuracy g{variant, dimensions[d], k, t.total, t.em, t.hm};
        g.em_accuracy = 100.0 * static_cast<double>(t.em) / static_cast<double>(t.total);
        g.hm_accuracy = 100.0 * static_cast<double>(t.hm) / static_cast<double>(t.total);
        report.groups.push_back(std::move(g));
    }
    for (const auto& [variant, c] : costs) {
        VariantCost v{variant, c.results, c.errored, c.degraded};
        if (c.answered) {
            const auto n = static_cast<double>(c.answered);
            v.mean_prompt_tokens = static_cast<double>(c.prompt) / n;
            v.mean_completion_tokens = static_cast<double>(c.completion) / n;
            v.mean_total_tokens = static_cast<double>(c.total) / n;
            v.mean_latency_ms = static_cast<double>(c.latency) / n;
        }
        report.costs.push_back(std::move(v));
    }
    return report;
}

std::string Report::to_json() const {
    json j{{"token_estimator", "provider usage, else ceil(characters / 4)"},
           {"groups", json::array()},
           {"costs", json::array()}};
    for (const auto& g : groups) {
        j["groups"].push_back({{"variant", g.variant},
                               {"dimension", g.dimension},
                               {"key", g.key},
                               {"total", g.total},
                               {"em", g.em},
                               {"hm", g.hm},
                               {"em_accuracy", g.em_accuracy},
                               {"hm_accuracy", g.hm_accuracy}});
    }
    for (const auto& c : costs) {
        j["costs"].push_back({{"variant", c.variant},
                              {"results", c.results},
                              {"errored", c.errored},
                              {"degraded", c.degraded},
                              {"mean_prompt_tokens", c.mean_prompt_tokens},
                              {"mean_completion_tokens", c.mean_completion_tokens},
                              {"mean_total_tokens", c.mean_total_tokens},
                              {"mean_latency_ms", c.mean_latency_ms}});
    }
    return j.dump(2);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fixed1(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << v;
    return os.str();
}

}  // namespace

std::string Report::groups_csv() const {
    std::string out = "variant,dimension,key,total,em,hm,em_accuracy,hm_accuracy\n";
    for (const auto& g : groups) {
        out += csv_field(g.variant) + "," + g.dimension + "," + csv_field(g.key) + "," + std::to_string(g.total) +
               "," + std::to_string(g.em) + "," + std::to_string(g.hm) + "," + fixed1(g.em_accuracy) + "," +
               fixed1(g.hm_accuracy) + "\n";
    }
    return out;
}

std::string Report::costs_csv() const {
    std::string out =
        "variant,results,errored,degraded,mean_prompt_tokens,mean_completion_tokens,mean_total_tokens,mean_latency_ms\n";
    for (const auto& c : costs) {
        out += csv_field(c.variant) + "," + std::to_string(c.results) + "," + std::to_string(c.errored) + "," +
               std::to_string(c.degraded) + "," + fixed1(c.mean_prompt_tokens) + "," +
               fixed1(c.mean_completion_tokens) + "," + fixed1(c.mean_total_tokens) + "," +
               fixed1(c.mean_latency_ms) + "\n";
    }
    return out;
}

}  // namespace glow::bench
