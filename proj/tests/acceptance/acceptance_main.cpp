// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// Everything runs offline: mock LLM, in-memory stores, stub GNN endpoint.
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "glow/text.hpp"
#include "scripted.hpp"
#include "sparql_oracle.hpp"
#include "stub_servers.hpp"

namespace {

using namespace glow;
using glow::test::fixture_registry;
using glow::test::fixture_suite;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

Outcome sparql_oracle() {
    const auto t0 = Clock::now();
    bench::Rng rng(20240611);
    int mismatches = 0, roundtrip_failures = 0, nonempty = 0;
    for (int i = 0; i < 100; ++i) {
        auto store = test::random_store(rng, 50);
        auto q = test::random_query(rng, store);
        auto got = sparql::execute(q, store);
        auto want = test::brute_force(q, store);
        if (got != want) ++mismatches;
        if (!want.rows.empty()) ++nonempty;
        if (sparql::parse(sparql::to_string(q)) != q) ++roundtrip_failures;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "100 queries, " << mismatches << " mismatches, " << roundtrip_failures << " round-trip failures, " << nonempty
      << " non-empty, " << fmt_seconds(secs);
    return {mismatches == 0 && roundtrip_failures == 0 && secs < 10.0, d.str()};
}

Outcome worked_example_fidelity() {
    const auto t0 = Clock::now();
    const auto kg = load_kg(test::fixture_config().kg("BioKG"));
    auto mock = llm::MockChatClient::from_transcript_file(test::data_path("mock/yohimbine.json"));
    const std::string yohimbine = "http://www.biokg.com/drug/DB01392";
    test::StubGnnServer gnn_server({{gnn::ModelKey::make("BioKG", "Drug", {"KINGDOM"}),
                                        {{yohimbine, {{"Organic", -0.12}, {"Non-Organic", -2.18}}}},
                                        {}}});
    gnn::GnnClient gnn({gnn_server.url()});

    Services services{mock.get(), test::fixture_config().answer_model, &gnn};
    auto r = ask("Predict the chemical kingdom for the drug Yohimbine from the BioKG knowledge graph.", kg,
                 prompt::Variant::gn, services, AskOptions::from(test::fixture_config().pipeline));

    std::vector<std::string> problems;
    if (!r.query.from_llm) problems.push_back("scripted query was not used");
    if (r.query_rows.rows.size() != 1) {
        problems.push_back("expected one result row, got " + std::to_string(r.query_rows.rows.size()));
    } else {
        const auto& row = r.query_rows.rows[0];
        if (row.size() != 2 || row[0] != kg::Term::iri(yohimbine) || kg.store.display(row[1]) != "Organic") {
            problems.push_back("result row is not (DB01392, Organic)");
        }
    }

    const std::string system = "You are an expert open world question answering system.";
    const std::string head =
        "What is the Kingdom of the Drug Yohimbine from the BioKG, a Biomedical knowledge graph.\n"
        "- Do not return any context or analysis.\n"
        "- Help: The possible list of Kingdoms are: [Organic,Non-Organic]\n"
        "- Verify the following GNN Answer: [Organic]\n"
        "- The Drug associated triples.\n"
        "[(\"Yohimbine\",\"DDI\",\"DB13677\"), ";
    const std::string tail = ")]\nAnswer:";
    const auto& user = r.prompt.user_text;
    if (r.used != prompt::Variant::gn) problems.push_back("ran as " + std::string(prompt::to_string(r.used)));
    if (r.prompt.system_text != system) problems.push_back("system text differs");
    if (user.rfind(head, 0) != 0) problems.push_back("prompt head differs");
    if (user.size() < head.size() + tail.size() || user.compare(user.size() - tail.size(), tail.size(), tail) != 0) {
        problems.push_back("prompt tail differs");
    } else if (problems.empty()) {
        // The elided middle must be well-formed ("s","p","o") elements.
        auto middle = user.substr(head.size(), user.size() - head.size() - tail.size() + 1);
        static const std::regex element(R"re(\("(?:[^"\\]|\\.)*","(?:[^"\\]|\\.)*","(?:[^"\\]|\\.)*"\))re");
        auto stripped = std::regex_replace(middle, element, "E");
        auto expected = std::string();
        for (std::size_t i = 1; i < r.rc->triples.size(); ++i) expected += i > 1 ? ", E" : "E";
        if (stripped != expected) problems.push_back("elided triples are not well-formed");
        if (r.rc->triples.size() != 50) problems.push_back("GN context should hold 50 triples");
    }
    if (r.answer != "Organic") problems.push_back("answer '" + r.answer + "'");

    const double secs = seconds_since(t0);
    if (secs >= 5.0) problems.push_back("took " + fmt_seconds(secs));
    std::string d = problems.empty() ? "1 row (DB01392, Organic); GN prompt matches, " + std::to_string(r.rc->triples.size()) +
                                           " triples, " + fmt_seconds(secs)
                                     : text::join(problems, "; ");
    return {problems.empty(), d};
}

// Bucket bounds written out independently of the library table.
std::pair<std::size_t, std::size_t> bucket_bounds(const std::string& name) {
    if (name == "2-4") return {2, 4};
    if (name == "4-8") return {4, 8};
    if (name == "8-16") return {8, 16};
    if (name == "16-32") return {16, 32};
    if (name == "32+") return {32, 40};
    return {1, 0};
}

Outcome open_world_exclusion() {
    const auto& records = fixture_suite();
    const auto& kgs = fixture_registry();
    llm::MockChatClient mock;
    test::script_suite(mock, records, kgs);

    std::size_t leaks = 0, gold_missing = 0, bucket_violations = 0, misgrounded = 0, failures = 0, triples_seen = 0;
    for (const auto& rec : records) {
        if (std::find(rec.choices.begin(), rec.choices.end(), rec.gold_answer) == rec.choices.end()) ++gold_missing;
        auto [lo, hi] = bucket_bounds(rec.mcc_bucket);
        if (rec.choices.size() < lo || rec.choices.size() > hi) ++bucket_violations;

        const auto& kg = kgs.get(rec.kg_name);
        auto opts = AskOptions::from(test::fixture_config().pipeline);
        opts.llm_sparql = false;
        opts.choices = rec.choices;
        AskResult r;
        try {
            r = ask(rec.question_text, kg, prompt::Variant::g, {&mock, {}, nullptr}, opts);
        } catch (const std::exception&) {
            ++failures;
            continue;
        }
        std::vector<std::string> path;
        for (const auto& p : r.linked.e_path) path.emplace_back(text::local_name(p));
        if (r.linked.v_t != rec.entity_iri || path != rec.edge_path) ++misgrounded;

        // Every node the context is drawn from: v_t and, for 2 hops, what e_path[0] reaches.
        std::set<std::string> sources{r.linked.v_t};
        if (r.linked.e_path.size() == 2) {
            for (const auto& t : kg.store.neighbors(r.linked.v_t, kg::Direction::out)) {
                if (t.predicate.value == r.linked.e_path[0] && t.object.is_iri()) sources.insert(t.object.value);
            }
        }
        std::set<std::string> path_preds(r.linked.e_path.begin(), r.linked.e_path.end());
        auto triples = retriever::context_triples(r.linked, kg.store, opts.cap_g);
        triples_seen += triples.size();
        for (const auto& t : triples) {
            bool touches = sources.count(t.subject.value) || (t.object.is_iri() && sources.count(t.object.value));
            if (touches && path_preds.count(t.predicate.value)) ++leaks;
        }
        // And in the serialized text: no (v_t, answer-edge, *) element.
        const auto& rc = r.prompt.ingredients.rc_text.value_or("");
        for (const auto& p : path) {
            if (rc.find("(\"" + r.linked.v_t_display + "\",\"" + p + "\",") != std::string::npos) ++leaks;
        }
    }
    std::ostringstream d;
    d << records.size() << " records, " << triples_seen << " context triples, " << leaks << " leaks, " << gold_missing
      << " gold outside choices, " << bucket_violations << " bucket violations, " << misgrounded << " misgrounded, "
      << failures << " failures";
    return {records.size() == 50 && leaks == 0 && gold_missing == 0 && bucket_violations == 0 && misgrounded == 0 &&
                failures == 0,
            d.str()};
}

Outcome judge_fidelity() {
    const std::vector<judge::Pair> pairs{
        {"music", "art"}, {"painter", "artist"}, {"football player", "soccer player"}, {"lawyer", "judge"}, {"lawyer", "player"}};
    llm::MockChatClient mock;
    test::script_judge(mock, "music", "art", "[[0,1],[0,1],[1,1],[0,1],[0,0]]");
    auto verdicts = judge::judge_batch(pairs, mock, {});
    const std::vector<judge::Verdict> want{{false, true, false}, {false, true, false}, {true, true, false},
                                           {false, true, false}, {false, false, false}};

    // The only literal pair after normalization; the mock says [1,1] for "football player"
    // vs "soccer player" but deterministic EM must not.
    bool literal_ok = judge::exact_match("Organic", " organic.") && !judge::exact_match("football player", "soccer player");
    llm::MockChatClient literal_mock;
    test::script_judge(literal_mock, "Organic", "organic", "[[1,1]]");
    auto literal = judge::judge_batch({{"Organic", "organic"}}, literal_mock, {});
    literal_ok = literal_ok && literal.size() == 1 && literal[0].em == judge::exact_match("Organic", "organic");

    std::string got;
    for (const auto& v : verdicts) got += std::string(got.empty() ? "" : ",") + "[" + (v.em ? "1" : "0") + "," + (v.hm ? "1" : "0") + "]";
    return {verdicts == want && literal_ok, "[" + got + "], literal pair " + (literal_ok ? "agrees" : "disagrees")};
}

std::vector<bench::RunResult> run_variant(prompt::Variant v, gnn::CandidateSource* gnn, llm::MockChatClient& mock) {
    bench::RunOptions opts;
    opts.ask = AskOptions::from(test::fixture_config().pipeline);
    opts.ask.llm_sparql = false;
    opts.concurrency = 4;
    bench::RunServices services;
    services.answer = {&mock, test::fixture_config().answer_model, gnn};
    return bench::run_suite(fixture_suite(), fixture_registry(), v, services, opts);
}

Outcome cost_ordering() {
    llm::MockChatClient mock;
    test::script_suite(mock, fixture_suite(), fixture_registry());
    test::StubGnnServer gnn_server(test::models_from_records(fixture_suite()));
    gnn::GnnClient gnn({gnn_server.url()});

    std::vector<bench::RunResult> all;
    for (auto v : {prompt::Variant::n, prompt::Variant::gn, prompt::Variant::g}) {
        auto part = run_variant(v, &gnn, mock);
        all.insert(all.end(), part.begin(), part.end());
    }
    auto report = bench::aggregate(all, fixture_suite());
    double n = 0, gn = 0, g = 0;
    std::size_t errored = 0, degraded = 0;
    for (const auto& c : report.costs) {
        if (c.variant == "n") n = c.mean_prompt_tokens;
        if (c.variant == "gn") gn = c.mean_prompt_tokens;
        if (c.variant == "g") g = c.mean_prompt_tokens;
        errored += c.errored;
        degraded += c.degraded;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean prompt tokens N %.1f < GN %.1f < G %.1f; %zu errored, %zu degraded", n, gn, g,
                  errored, degraded);
    return {errored == 0 && degraded == 0 && n < gn && gn < g, buf};
}

Outcome harness_correctness() {
    // Five drug-kingdom and five film-language questions; records 4, 8 and 9 answered wrong,
    // and the judge grants record 8 a hierarchical match.
    std::vector<bench::BenchmarkRecord> records;
    for (const auto* tmpl : {"bio-drug-kingdom", "mdb-film-language"}) {
        int taken = 0;
        for (const auto& r : fixture_suite()) {
            if (r.template_id == tmpl && taken < 5) {
                records.push_back(r);
                ++taken;
            }
        }
    }
    llm::MockChatClient mock;
    std::string verdicts;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        test::script_question(mock, r, fixture_registry().get(r.kg_name));
        bool wrong = i == 4 || i == 8 || i == 9;
        std::string answer = r.gold_answer;
        if (wrong) {
            for (const auto& c : r.choices) {
                if (c != r.gold_answer) {
                    answer = c;
                    break;
                }
            }
        }
        test::script_answer(mock, r, answer);
        verdicts += std::string(i ? "," : "") + (wrong ? (i == 8 ? "[0,1]" : "[0,0]") : "[1,1]");
    }
    test::script_judge(mock, records[0].gold_answer, records[0].gold_answer, "[" + verdicts + "]");

    bench::RunOptions opts;
    opts.ask = AskOptions::from(test::fixture_config().pipeline);
    opts.ask.llm_sparql = false;
    bench::RunServices services;
    services.answer = {&mock, {}, nullptr};
    auto results = bench::run_suite(records, fixture_registry(), prompt::Variant::basic, services, opts);
    auto report = bench::aggregate(results, records);

    struct Row {
        const char* dimension;
        const char* key;
        std::size_t total;
        double em, hm;
    };
    const Row table[] = {{"all", "all", 10, 70.0, 80.0},
                         {"template", "bio-drug-kingdom", 5, 80.0, 80.0},
                         {"template", "mdb-film-language", 5, 60.0, 80.0},
                         {"kg", "BioKG", 5, 80.0, 80.0},
                         {"kg", "LinkedMDB", 5, 60.0, 80.0},
                         {"hops", "1", 10, 70.0, 80.0},
                         {"domain", "DS", 5, 80.0, 80.0},
                         {"domain", "E", 5, 60.0, 80.0},
                         {"mcc", "2-4", 5, 80.0, 80.0},
                         {"mcc", "8-16", 5, 60.0, 80.0}};
    std::vector<std::string> problems;
    for (const auto& row : table) {
        const auto* g = report.find("basic", row.dimension, row.key);
        if (!g || g->total != row.total || g->em_accuracy != row.em || g->hm_accuracy != row.hm) {
            problems.push_back(std::string(row.dimension) + "/" + row.key);
        }
    }
    for (const auto& g : report.groups) {
        if (g.hm < g.em) problems.push_back("HM < EM in " + g.dimension + "/" + g.key);
    }
    if (report.groups.size() != std::size(table)) problems.push_back("unexpected group count");
    for (const auto& r : results) {
        if (!r.error.empty()) problems.push_back(r.record_id + ": " + r.error);
        if (r.verdict && r.verdict->fallback) problems.push_back(r.record_id + " judged by fallback");
    }
    const auto* all = report.find("basic", "all", "all");
    std::ostringstream d;
    if (all) d << "EM " << all->em_accuracy << ", HM " << all->hm_accuracy << " over " << all->total << "; ";
    d << report.groups.size() << " groups" << (problems.empty() ? " match" : ", mismatches: " + text::join(problems, ", "));
    return {problems.empty(), d.str()};
}

Outcome degradation() {
    llm::MockChatClient mock;
    test::script_suite(mock, fixture_suite(), fixture_registry());
    auto g_run = run_variant(prompt::Variant::g, nullptr, mock);

    gnn::GnnClient unreachable({test::closed_url(), std::chrono::milliseconds(2000), 4});
    test::StubGnnServer empty_server({});
    gnn::GnnClient no_models({empty_server.url()});

    std::vector<std::string> problems;
    std::size_t flagged = 0, total = 0;
    const std::pair<const char*, gnn::CandidateSource*> setups[] = {
        {"unset", nullptr}, {"unreachable", &unreachable}, {"no model", &no_models}};
    for (const auto& [name, source] : setups) {
        auto gn_run = run_variant(prompt::Variant::gn, source, mock);
        for (std::size_t i = 0; i < gn_run.size(); ++i) {
            const auto& r = gn_run[i];
            ++total;
            if (r.degraded && r.variant_used == prompt::Variant::g && r.variant == prompt::Variant::gn) ++flagged;
            if (!r.error.empty()) problems.push_back(std::string(name) + " " + r.record_id + ": " + r.error);
            if (r.rc_text != g_run[i].rc_text || r.prompt_tokens != g_run[i].prompt_tokens) {
                problems.push_back(std::string(name) + " " + r.record_id + " differs from G");
            }
        }
    }
    if (empty_server.predict_calls() != fixture_suite().size()) problems.push_back("stub was not consulted per record");
    std::ostringstream d;
    d << flagged << "/" << total << " GN results ran as G with the flag set (endpoint unset, unreachable, no model)";
    if (!problems.empty()) d << "; " << problems.size() << " problems, first: " << problems.front();
    return {flagged == total && total == 3 * fixture_suite().size() && problems.empty(), d.str()};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::off);
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"sparql-correctness", sparql_oracle},
        {"worked-example-fidelity", worked_example_fidelity},
        {"open-world-exclusion", open_world_exclusion},
        {"judge-fidelity", judge_fidelity},
        {"cost-ordering", cost_ordering},
        {"harness-correctness", harness_correctness},
        {"degradation", degradation},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (std::size(criteria) - failed) << "/" << std::size(criteria) << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
