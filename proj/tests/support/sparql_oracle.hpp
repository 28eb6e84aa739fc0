#pragma once

#include "glow/bench.hpp"
#include "glow/kg_store.hpp"
#include "glow/sparql.hpp"

// Random stores and queries plus a brute-force evaluator to check the
// executor against.
namespace glow::test {

/// Up to `max_triples` over 8 nodes, 3 predicates and 3 awkward literals.
kg::TripleStore random_store(bench::Rng& rng, std::size_t max_triples);

/// 1-3 connected patterns cut from real triples, so most queries have
/// answers; sometimes VALUES, aliases and LIMIT. At most 4 variables.
sparql::SparqlQuery random_query(bench::Rng& rng, const kg::TripleStore& store);

/// Tries every assignment of store terms and VALUES constants to the
/// query variables and keeps those satisfying every pattern and clause.
sparql::ResultSet brute_force(const sparql::SparqlQuery& query, const kg::TripleStore& store);

}  // namespace glow::test
