#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "glow/sparql.hpp"
#include "sparql_oracle.hpp"

using namespace glow;
using kg::Term;
using sparql::Variable;

namespace {

constexpr const char* kKingdomQuery =
    "PREFIX biokg: <http://www.biokg.com/>\n"
    "SELECT ?drug as ?vt ?kingdom as ?vl\n"
    "WHERE { VALUES ?name { \"Yohimbine\" } ?drug biokg:NAME ?name . ?drug biokg:KINGDOM ?kingdom .}";

}  // namespace

TEST(SparqlParse, KingdomQuery) {
    auto q = sparql::parse(kKingdomQuery);
    ASSERT_EQ(q.projections.size(), 2u);
    EXPECT_EQ(q.projections[0].variable, "drug");
    EXPECT_EQ(q.projections[0].column(), "vt");
    EXPECT_EQ(q.projections[1].column(), "vl");
    ASSERT_EQ(q.values.size(), 1u);
    EXPECT_EQ(q.values[0].values, (std::vector<Term>{Term::literal("Yohimbine")}));
    ASSERT_EQ(q.patterns.size(), 2u);
    EXPECT_EQ(q.patterns[1].predicate, sparql::PatternTerm(Term::iri("http://www.biokg.com/KINGDOM")));
    EXPECT_FALSE(q.limit);
}

TEST(SparqlParse, AbbreviationsKeywordsAndLimit) {
    auto q = sparql::parse(
        "prefix : <http://x/> select distinct (?s AS ?subject) ?o where { ?s a :T ; :p ?o , \"lit\" } limit 5");
    ASSERT_EQ(q.patterns.size(), 3u);
    EXPECT_EQ(q.patterns[0].predicate,
              sparql::PatternTerm(Term::iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")));
    EXPECT_EQ(q.patterns[1].subject, sparql::PatternTerm(Variable{"s"}));
    EXPECT_EQ(q.patterns[2].object, sparql::PatternTerm(Term::literal("lit")));
    EXPECT_EQ(q.limit, 5u);
    EXPECT_EQ(q.projections[0].column(), "subject");
}

TEST(SparqlParse, RejectsWhatTheSubsetLacks) {
    EXPECT_THROW(sparql::parse("SELECT ?s WHERE { ?s ?p ?o FILTER(?o) }"), sparql::SyntaxError);
    EXPECT_THROW(sparql::parse("SELECT ?s WHERE { ?s ?p ?o OPTIONAL { ?s ?p ?x } }"), sparql::SyntaxError);
    EXPECT_THROW(sparql::parse("SELECT ?s WHERE { ?s ?p ?o "), sparql::SyntaxError);
    EXPECT_THROW(sparql::parse("SELECT ?s WHERE { ?s bad:p ?o }"), sparql::UnknownPrefixError);
    EXPECT_THROW(sparql::parse("SELECT ?x WHERE { ?s ?p ?o }"), sparql::UnboundProjectionError);
    EXPECT_THROW(sparql::parse("ASK { ?s ?p ?o }"), sparql::SyntaxError);
}

TEST(SparqlParse, SyntaxErrorCarriesOffset) {
    try {
        sparql::parse("SELECT ?s WHERE { ?s ?p ?o } LIMIT x");
        FAIL();
    } catch (const sparql::SyntaxError& e) {
        EXPECT_EQ(e.offset(), 35u);
    }
}

TEST(SparqlParse, ToStringRoundTripsGeneratedQueries) {
    bench::Rng rng(99);
    for (int i = 0; i < 50; ++i) {
        auto store = test::random_store(rng, 30);
        auto q = test::random_query(rng, store);
        EXPECT_EQ(sparql::parse(sparql::to_string(q)), q) << sparql::to_string(q);
    }
    auto kingdom = sparql::parse(kKingdomQuery);
    EXPECT_EQ(sparql::parse(sparql::to_string(kingdom)), kingdom);
}

TEST(SparqlExecute, MatchesBruteForceOracle) {
    bench::Rng rng(12345);
    for (int i = 0; i < 200; ++i) {
        auto store = test::random_store(rng, 50);
        auto q = test::random_query(rng, store);
        ASSERT_EQ(sparql::execute(q, store), test::brute_force(q, store)) << sparql::to_string(q);
    }
}

TEST(SparqlExecute, RepeatedVariableInOnePattern) {
    auto store = kg::TripleStore::from_triples(
        {{Term::iri("http://x/a"), Term::iri("http://x/p"), Term::iri("http://x/a")},
         {Term::iri("http://x/a"), Term::iri("http://x/p"), Term::iri("http://x/b")}});
    auto rs = sparql::execute(sparql::parse("SELECT ?s WHERE { ?s <http://x/p> ?s }"), store);
    ASSERT_EQ(rs.rows.size(), 1u);
    EXPECT_EQ(rs.rows[0][0], Term::iri("http://x/a"));
}

// Adding triples can only add rows.
TEST(SparqlExecute, MonotoneInTheStore) {
    bench::Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        auto small = test::random_store(rng, 25);
        auto extra = test::random_store(rng, 25);
        std::vector<kg::Triple> merged(small.triples().begin(), small.triples().end());
        merged.insert(merged.end(), extra.triples().begin(), extra.triples().end());
        auto big = kg::TripleStore::from_triples(merged);
        auto q = test::random_query(rng, small);
        q.limit.reset();
        auto a = sparql::execute(q, small).rows;
        auto b = sparql::execute(q, big).rows;
        std::set<std::vector<Term>> bs(b.begin(), b.end());
        for (const auto& row : a) EXPECT_TRUE(bs.count(row)) << sparql::to_string(q);
    }
}

TEST(SparqlExecute, LimitTakesAPrefix) {
    bench::Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        auto store = test::random_store(rng, 50);
        auto q = test::random_query(rng, store);
        q.limit.reset();
        auto full = sparql::execute(q, store).rows;
        auto n = rng.below(full.size() + 2);
        q.limit = n;
        auto cut = sparql::execute(q, store).rows;
        ASSERT_EQ(cut.size(), std::min<std::size_t>(n, full.size()));
        EXPECT_TRUE(std::equal(cut.begin(), cut.end(), full.begin()));
    }
}

TEST(SparqlExecute, EmptyValuesGivesNoRows) {
    sparql::SparqlQuery q;
    q.values.push_back({"x", {}});
    q.patterns.push_back({Variable{"x"}, Variable{"p"}, Variable{"o"}});
    q.projections.push_back({"x", std::nullopt});
    auto store = kg::TripleStore::from_triples({{Term::iri("http://x/a"), Term::iri("http://x/p"), Term::iri("http://x/b")}});
    EXPECT_TRUE(sparql::execute(q, store).rows.empty());
}

TEST(SparqlExecute, KingdomQueryOnFixtureGivesOneRow) {
    const auto& kg = test::biokg();
    auto rs = sparql::execute(sparql::parse(kKingdomQuery), kg.store);
    EXPECT_EQ(rs.columns, (std::vector<std::string>{"vt", "vl"}));
    ASSERT_EQ(rs.rows.size(), 1u);
    EXPECT_EQ(rs.rows[0][0], Term::iri("http://www.biokg.com/drug/DB01392"));
    EXPECT_EQ(kg.store.display(rs.rows[0][1]), "Organic");
}

TEST(SparqlResultsJson, MapsBindingsAndUnboundCells) {
    auto rs = sparql::parse_results_json(R"({"head":{"vars":["s","o"]},"results":{"bindings":[
        {"s":{"type":"uri","value":"http://x/a"},"o":{"type":"literal","value":"A","xml:lang":"en"}},
        {"s":{"type":"uri","value":"http://x/b"}}]}})");
    EXPECT_EQ(rs.columns, (std::vector<std::string>{"s", "o"}));
    ASSERT_EQ(rs.rows.size(), 2u);
    EXPECT_EQ(rs.rows[0][1], Term::literal("A"));
    EXPECT_EQ(rs.rows[1][1], Term::literal(""));
    EXPECT_THROW(sparql::parse_results_json("{\"head\":{}}"), sparql::EndpointError);
}
