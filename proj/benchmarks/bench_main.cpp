#include <benchmark/benchmark.h>

#include "glow/config.hpp"
#include "glow/judge.hpp"
#include "glow/pipeline.hpp"
#include "glow/prompt_builder.hpp"
#include "glow/retriever.hpp"
#include "glow/sparql.hpp"

namespace {

using namespace glow;

const KnowledgeGraph& biokg() {
    static const KnowledgeGraph kg = load_kg(load_config(std::string(GLOW_DATA_DIR) + "/glow.ini").kg("BioKG"));
    return kg;
}

linker::LinkedQuestion yohimbine() {
    linker::LinkedQuestion l;
    l.v_t = "http://www.biokg.com/drug/DB01392";
    l.v_t_display = "Yohimbine";
    l.entity_type = "Drug";
    l.e_path = {"http://www.biokg.com/KINGDOM"};
    l.label_bgp = {"Drug", "KINGDOM", "Kingdom", "http://www.biokg.com/KINGDOM"};
    l.label_type = "Kingdom";
    l.path_bgps = {l.label_bgp};
    return l;
}

void BM_LoadFixtureGraph(benchmark::State& state) {
    const auto path = std::string(GLOW_DATA_DIR) + "/biokg/biokg.nt";
    for (auto _ : state) benchmark::DoNotOptimize(kg::load_triples_file(path, kg::TripleFormat::ntriples));
}
BENCHMARK(BM_LoadFixtureGraph)->Unit(benchmark::kMillisecond);

void BM_Neighbors(benchmark::State& state) {
    const auto& store = biokg().store;
    for (auto _ : state) benchmark::DoNotOptimize(store.neighbors("http://www.biokg.com/drug/DB01392", kg::Direction::both));
}
BENCHMARK(BM_Neighbors);

void BM_SparqlParse(benchmark::State& state) {
    const std::string text =
        "PREFIX biokg: <http://www.biokg.com/>\nSELECT ?drug as ?vt ?kingdom as ?vl\n"
        "WHERE { VALUES ?name { \"Yohimbine\" } ?drug biokg:NAME ?name . ?drug biokg:KINGDOM ?kingdom .}";
    for (auto _ : state) benchmark::DoNotOptimize(sparql::parse(text));
}
BENCHMARK(BM_SparqlParse);

void BM_SparqlExecute(benchmark::State& state) {
    const auto q = sparql::parse(
        "PREFIX biokg: <http://www.biokg.com/>\nSELECT ?d ?k ?o WHERE { ?d biokg:KINGDOM ?k . ?d biokg:DDI ?o . }");
    for (auto _ : state) benchmark::DoNotOptimize(sparql::execute(q, biokg().store));
}
BENCHMARK(BM_SparqlExecute)->Unit(benchmark::kMicrosecond);

void BM_ContextAndPrompt(benchmark::State& state) {
    const auto l = yohimbine();
    const auto labels = retriever::get_labels(l, biokg().store);
    const gnn::CandidateSet cands{{{"Organic", -0.1}, {"Non-Organic", -2.0}}, 3};
    for (auto _ : state) {
        auto rc = retriever::get_context(l, biokg().store, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(prompt::build(prompt::Variant::gn, "q", l, labels, &rc, &cands, biokg().description));
    }
}
BENCHMARK(BM_ContextAndPrompt)->Arg(50)->Arg(100);

void BM_Normalize(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(judge::normalize("  The \"Football Player\", retired (1998). "));
}
BENCHMARK(BM_Normalize);

}  // namespace
BENCHMARK_MAIN();
