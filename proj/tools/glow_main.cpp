// glow: ask questions, build and run benchmark suites, judge answer pairs.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "glow/bench.hpp"
#include "glow/config.hpp"
#include "glow/gnn_bridge.hpp"
#include "glow/judge.hpp"
#include "glow/llm_gateway.hpp"
#include "glow/pipeline.hpp"
#include "glow/text.hpp"

namespace {

using json = nlohmann::json;

struct Common {
    std::string config_path;
    std::string mock_path;
    std::string gnn_url;
    std::string log_level = "warn";
};

std::string default_config() {
    if (const char* env = std::getenv("GLOW_CONFIG")) return env;
    return "glow.ini";
}

std::unique_ptr<glow::llm::ChatClient> make_llm(const Common& c, const glow::Config& cfg) {
    if (!c.mock_path.empty()) return glow::llm::MockChatClient::from_transcript_file(c.mock_path);
    auto opts = glow::llm::HttpClientOptions::from_env();
    if (!cfg.llm.endpoint.empty()) opts.endpoint = cfg.llm.endpoint;
    if (const char* key = std::getenv(cfg.llm.api_key_env.c_str())) opts.api_key = key;
    opts.max_attempts = cfg.llm.max_attempts;
    opts.timeout = cfg.llm.timeout;
    opts.max_in_flight = cfg.llm.max_in_flight;
    if (opts.endpoint.empty()) {
        throw glow::Error("no LLM endpoint: set [llm] endpoint or GLOW_LLM_URL, or pass --mock TRANSCRIPT");
    }
    return std::make_unique<glow::llm::HttpChatClient>(opts);
}

std::unique_ptr<glow::gnn::CandidateSource> make_gnn(const Common& c, const glow::Config& cfg) {
    auto url = c.gnn_url.empty() ? cfg.gnn_endpoint : c.gnn_url;
    if (url.empty()) return nullptr;
    return std::make_unique<glow::gnn::GnnClient>(glow::gnn::GnnClientOptions{url, cfg.gnn_timeout, cfg.llm.max_in_flight});
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw glow::Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw glow::Error("cannot write " + path.string());
    out << body;
}

int cmd_ask(const Common& c, const std::string& question, const std::string& kg_name, const std::string& variant,
            int top_k, bool show_prompt) {
    auto cfg = glow::load_config(c.config_path);
    auto kg = glow::load_kg(cfg.kg(kg_name));
    auto llm = make_llm(c, cfg);
    auto gnn = make_gnn(c, cfg);

    auto options = glow::AskOptions::from(cfg.pipeline);
    if (top_k > 0) options.top_k = top_k;
    glow::Services services{llm.get(), cfg.answer_model, gnn.get()};
    auto r = glow::ask(question, kg, glow::prompt::parse_variant(variant), services, options);

    json out{{"answer", r.answer},
             {"variant", glow::prompt::to_string(r.requested)},
             {"variant_used", glow::prompt::to_string(r.used)},
             {"degraded", r.degraded},
             {"entity", r.linked.v_t},
             {"entity_type", r.linked.entity_type},
             {"edge_path", r.linked.e_path},
             {"labels", r.labels.labels},
             {"query", glow::sparql::to_string(r.query.query)},
             {"query_from_llm", r.query.from_llm},
             {"prompt_tokens", r.prompt_tokens},
             {"completion_tokens", r.completion_tokens},
             {"total_tokens", r.total_tokens},
             {"latency_ms", r.latency.count()},
             {"warnings", r.warnings}};
    if (r.degraded) out["degradation_reason"] = r.degradation_reason;
    if (r.gnn) {
        json cands = json::array();
        for (const auto& cand : r.gnn->candidates) cands.push_back({{"label", cand.label}, {"log_likelihood", cand.log_likelihood}});
        out["gnn_candidates"] = cands;
    }
    if (r.rc) out["context_triples"] = r.rc->triples.size();
    if (show_prompt) out["prompt"] = {{"system", r.prompt.system_text}, {"user", r.prompt.user_text}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_bench(const Common& c, const std::string& suite_path, const std::string& variant_text,
              const std::string& out_dir, int runs) {
    auto cfg = glow::load_config(c.config_path);
    auto records = glow::bench::read_suite(suite_path);
    glow::KgRegistry kgs;
    for (const auto& r : records) {
        if (!kgs.contains(r.kg_name)) kgs.add(glow::load_kg(cfg.kg(r.kg_name)));
    }
    auto llm = make_llm(c, cfg);
    auto gnn = make_gnn(c, cfg);
    const auto variant = glow::prompt::parse_variant(variant_text);

    std::vector<glow::bench::RunResult> all;
    for (int run = 0; run < runs; ++run) {
        glow::bench::RunOptions options;
        options.ask = glow::AskOptions::from(cfg.pipeline);
        options.judge_model = cfg.judge_model;
        options.judge.batch_size = cfg.pipeline.judge_batch;
        options.concurrency = cfg.pipeline.concurrency;
        options.run = run;
        glow::bench::RunServices services;
        services.answer = {llm.get(), cfg.answer_model, gnn.get()};
        services.answer.answer_model.seed = cfg.answer_model.seed.value_or(0) + run;
        auto results = glow::bench::run_suite(records, kgs, variant, services, options);
        all.insert(all.end(), results.begin(), results.end());
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    std::string lines;
    for (const auto& r : all) lines += glow::bench::to_json_line(r) + "\n";
    write_file(dir / "results.jsonl", lines);
    auto report = glow::bench::aggregate(all, records);
    write_file(dir / "report.json", report.to_json() + "\n");
    write_file(dir / "groups.csv", report.groups_csv());
    write_file(dir / "costs.csv", report.costs_csv());

    if (const auto* overall = report.find(glow::prompt::to_string(variant), "all", "all")) {
        std::cout << glow::prompt::to_string(variant) << ": " << overall->total << " results, EM " << overall->em_accuracy
                  << ", HM " << overall->hm_accuracy << " (" << out_dir << ")\n";
    }
    return 0;
}

int cmd_build_suite(const Common& c, const std::string& kg_name, const std::string& template_path, std::size_t n,
                    const std::string& mcc, std::uint64_t seed, const std::string& out_path) {
    auto cfg = glow::load_config(c.config_path);
    auto kg = glow::load_kg(cfg.kg(kg_name));
    auto tmpl = glow::bench::QuestionTemplate::from_file(template_path);
    auto records = glow::bench::build_suite(kg, tmpl, n, mcc, seed);
    if (out_path.empty() || out_path == "-") {
        for (const auto& r : records) std::cout << glow::bench::to_json_line(r) << "\n";
    } else {
        glow::bench::write_suite(out_path, records);
    }
    return 0;
}

int cmd_judge(const Common& c, const std::string& pairs_path) {
    auto cfg = glow::load_config(c.config_path);
    auto doc = json::parse(read_file(pairs_path));
    std::vector<glow::judge::Pair> pairs;
    for (const auto& p : doc) {
        if (p.is_array() && p.size() == 2) {
            pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
        } else if (p.is_object()) {
            pairs.emplace_back(p.at("predicted").get<std::string>(), p.at("gold").get<std::string>());
        } else {
            throw glow::Error("pairs must be [predicted, gold] arrays or {\"predicted\", \"gold\"} objects");
        }
    }
    auto llm = make_llm(c, cfg);
    glow::judge::JudgeOptions options;
    options.batch_size = cfg.pipeline.judge_batch;
    auto verdicts = glow::judge::judge_batch(pairs, *llm, cfg.judge_model, options);
    json out = json::array();
    for (const auto& v : verdicts) out.push_back({v.em ? 1 : 0, v.hm ? 1 : 0});
    std::cout << out.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open-world question answering over knowledge graphs"};
    app.require_subcommand(1);
    Common common;
    common.config_path = default_config();
    app.add_option("--config", common.config_path, "INI config file (default $GLOW_CONFIG or ./glow.ini)");
    app.add_option("--mock", common.mock_path, "Replay LLM answers from a JSON transcript instead of calling an endpoint");
    app.add_option("--gnn", common.gnn_url, "GNN service base URL, overrides [gnn] endpoint");
    app.add_option("--log-level", common.log_level, "trace, debug, info, warn, error or off");

    std::string question, kg_name, variant = "gn";
    int top_k = 0;
    bool show_prompt = false;
    auto* ask = app.add_subcommand("ask", "Answer one question");
    ask->add_option("--question", question, "Question text")->required();
    ask->add_option("--kg", kg_name, "Knowledge graph name from the config")->required();
    ask->add_option("--variant", variant, "basic, g, n or gn")->check(CLI::IsMember({"basic", "l", "g", "n", "gn"}, CLI::ignore_case));
    ask->add_option("--top-k", top_k, "GNN candidates to request (default from config)")->check(CLI::PositiveNumber);
    ask->add_flag("--show-prompt", show_prompt, "Include the answer prompt in the output");

    std::string suite, out_dir, bench_variant = "gn";
    int runs = 1;
    auto* bench = app.add_subcommand("bench", "Run a benchmark suite and write results and reports");
    bench->add_option("--suite", suite, "Suite file (JSON lines)")->required()->check(CLI::ExistingFile);
    bench->add_option("--variant", bench_variant, "basic, g, n or gn")->check(CLI::IsMember({"basic", "l", "g", "n", "gn"}, CLI::ignore_case));
    bench->add_option("--out", out_dir, "Output directory")->required();
    bench->add_option("--runs", runs, "Repetitions with distinct seeds")->check(CLI::PositiveNumber);

    std::string suite_kg, template_path, mcc, suite_out;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    auto* build = app.add_subcommand("build-suite", "Sample benchmark records from a question template");
    build->add_option("--kg", suite_kg, "Knowledge graph name from the config")->required();
    build->add_option("--template", template_path, "Template JSON file")->required()->check(CLI::ExistingFile);
    build->add_option("--n", n, "Number of questions")->required();
    build->add_option("--mcc", mcc, "Choice-count bucket: 2-4, 4-8, 8-16, 16-32 or 32+")->required();
    build->add_option("--seed", seed, "Sampling seed")->required();
    build->add_option("--out", suite_out, "Write to this file instead of stdout");

    std::string pairs_path;
    auto* judge = app.add_subcommand("judge", "Score predicted/gold pairs");
    judge->add_option("--pairs", pairs_path, "JSON array of [predicted, gold] pairs")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    spdlog::set_default_logger(spdlog::stderr_color_mt("glow"));
    spdlog::set_level(spdlog::level::from_str(common.log_level));

    try {
        if (*ask) return cmd_ask(common, question, kg_name, glow::text::to_lower(variant), top_k, show_prompt);
        if (*bench) return cmd_bench(common, suite, glow::text::to_lower(bench_variant), out_dir, runs);
        if (*build) return cmd_build_suite(common, suite_kg, template_path, n, mcc, seed, suite_out);
        if (*judge) return cmd_judge(common, pairs_path);
    } catch (const std::exception& e) {
        std::cerr << "glow: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
