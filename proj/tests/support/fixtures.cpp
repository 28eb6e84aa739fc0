#include "fixtures.hpp"

namespace glow::test {

std::string data_path(std::string_view relative) { return std::string(GLOW_DATA_DIR) + "/" + std::string(relative); }

const Config& fixture_config() {
    static const Config cfg = load_config(data_path("glow.ini"));
    return cfg;
}

const KnowledgeGraph& biokg() {
    static const KnowledgeGraph kg = load_kg(fixture_config().kg("BioKG"));
    return kg;
}

const KnowledgeGraph& linkedmdb() {
    static const KnowledgeGraph kg = load_kg(fixture_config().kg("LinkedMDB"));
    return kg;
}

const KgRegistry& fixture_registry() {
    static const KgRegistry reg = [] {
        KgRegistry r;
        r.add(biokg());
        r.add(linkedmdb());
        return r;
    }();
    return reg;
}

const std::vector<bench::BenchmarkRecord>& fixture_suite() {
    static const auto records = bench::read_suite(data_path("suites/fixture50.jsonl"));
    return records;
}

}  // namespace glow::test
