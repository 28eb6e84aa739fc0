#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "glow/bench.hpp"
#include "glow/config.hpp"
#include "glow/pipeline.hpp"

namespace glow::test {

std::string data_path(std::string_view relative);

/// data/glow.ini, loaded once.
const Config& fixture_config();
/// The two fixture graphs, loaded once.
const KnowledgeGraph& biokg();
const KnowledgeGraph& linkedmdb();
const KgRegistry& fixture_registry();

/// data/suites/fixture50.jsonl
const std::vector<bench::BenchmarkRecord>& fixture_suite();

}  // namespace glow::test
