#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "glow/kg_store.hpp"
#include "sparql_oracle.hpp"

using namespace glow;
using kg::Direction;
using kg::Term;
using kg::Triple;

namespace {

Triple tr(std::string s, std::string p, Term o) { return {Term::iri(std::move(s)), Term::iri(std::move(p)), std::move(o)}; }

constexpr const char* kType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

}  // namespace

TEST(NTriples, ParsesEscapesCommentsAndBlankLines) {
    std::istringstream in(
        "# comment\n"
        "\n"
        "<http://x/a> <http://x/name> \"say \\\"hi\\\"\\n\\u00e9\" .\n"
        "<http://x/a> <http://x/p> <http://x/b> . # trailing\n"
        "<http://x/a> <http://x/q> \"typed\"^^<http://www.w3.org/2001/XMLSchema#string> .\n"
        "<http://x/a> <http://x/q> \"tagged\"@en .\n");
    auto store = kg::load_triples(in, kg::TripleFormat::ntriples);
    ASSERT_EQ(store.size(), 4u);
    EXPECT_TRUE(store.contains(tr("http://x/a", "http://x/name", Term::literal("say \"hi\"\n\xc3\xa9"))));
    EXPECT_TRUE(store.contains(tr("http://x/a", "http://x/q", Term::literal("typed"))));
    EXPECT_TRUE(store.contains(tr("http://x/a", "http://x/q", Term::literal("tagged"))));
}

TEST(NTriples, ReportsTheOffendingLine) {
    std::istringstream in("<http://x/a> <http://x/p> <http://x/b> .\n<http://x/a> <http://x/p> .\n");
    try {
        kg::load_triples(in, kg::TripleFormat::ntriples);
        FAIL() << "expected ParseError";
    } catch (const kg::ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(NTriples, TsvColumnsBecomeTerms) {
    std::istringstream in("<http://x/a>\t<http://x/p>\t<http://x/b>\n<http://x/a>\t<http://x/name>\tAlpha\n");
    auto store = kg::load_triples(in, kg::TripleFormat::tsv);
    EXPECT_TRUE(store.contains(tr("http://x/a", "http://x/p", Term::iri("http://x/b"))));
    EXPECT_TRUE(store.contains(tr("http://x/a", "http://x/name", Term::literal("Alpha"))));
}

TEST(NTriples, WriteThenLoadRoundTrips) {
    auto store = kg::TripleStore::from_triples({tr("http://x/a", "http://x/name", Term::literal("q\"\\\n\t")),
                                                tr("http://x/a", "http://x/p", Term::iri("http://x/b"))});
    std::istringstream in(kg::to_ntriples(store));
    auto again = kg::load_triples(in, kg::TripleFormat::ntriples);
    EXPECT_TRUE(std::equal(store.triples().begin(), store.triples().end(), again.triples().begin(), again.triples().end()));
}

TEST(TripleStore, DuplicatesCollapse) {
    auto t = tr("http://x/a", "http://x/p", Term::iri("http://x/b"));
    EXPECT_EQ(kg::TripleStore::from_triples({t, t, t}).size(), 1u);
}

// Property: neighbors() is exactly the linear-scan answer, in the documented order.
TEST(TripleStore, NeighborsMatchLinearScanOnRandomStores) {
    bench::Rng rng(7);
    for (int round = 0; round < 100; ++round) {
        auto store = test::random_store(rng, 60);
        std::set<std::string> nodes;
        for (const auto& t : store.triples()) {
            nodes.insert(t.subject.value);
            if (t.object.is_iri()) nodes.insert(t.object.value);
        }
        nodes.insert("http://t.example/absent");
        for (const auto& n : nodes) {
            std::multiset<Triple> out, in, both;
            for (const auto& t : store.triples()) {
                bool is_out = t.subject.value == n;
                bool is_in = t.object.is_iri() && t.object.value == n;
                if (is_out) out.insert(t);
                if (is_in) in.insert(t);
                if (is_out || is_in) both.insert(t);
            }
            auto as_set = [](const std::vector<Triple>& v) { return std::multiset<Triple>(v.begin(), v.end()); };
            EXPECT_EQ(as_set(store.neighbors(n, Direction::out)), out);
            EXPECT_EQ(as_set(store.neighbors(n, Direction::in)), in);
            auto b = store.neighbors(n, Direction::both);
            EXPECT_EQ(as_set(b), both);
            for (std::size_t i = 1; i < b.size(); ++i) {
                auto counterpart = [&](const Triple& t) { return t.subject.value == n ? t.object : t.subject; };
                auto prev = std::make_pair(b[i - 1].predicate, counterpart(b[i - 1]));
                EXPECT_LE(prev, std::make_pair(b[i].predicate, counterpart(b[i])));
            }
        }
    }
}

TEST(TripleStore, TypesNamesAndDisplay) {
    auto store = kg::TripleStore::from_triples({
        tr("http://x/d1", kType, Term::iri("http://x/class/Drug")),
        tr("http://x/d1", kType, Term::iri("http://x/class/Compound")),
        tr("http://x/d1", "http://x/NAME", Term::literal("Aspirin")),
        tr("http://x/d1", "http://www.w3.org/2000/01/rdf-schema#label", Term::literal("ASA")),
        tr("http://x/d2", kType, Term::iri("http://x/class/Drug")),
        tr("http://x/d2", "http://x/title", Term::literal("aspirin")),
        tr("http://x/d3", "http://x/p", Term::iri("http://x/d1")),
    });
    EXPECT_EQ(std::vector<std::string>(store.types_of("http://x/d1").begin(), store.types_of("http://x/d1").end()),
              (std::vector<std::string>{"Compound", "Drug"}));
    EXPECT_TRUE(store.types_of("http://x/d3").empty());
    EXPECT_EQ(store.nodes_of_type("Drug"), (std::vector<std::string>{"http://x/d1", "http://x/d2"}));
    EXPECT_EQ(store.nodes_named("ASPIRIN"), (std::vector<std::string>{"http://x/d1", "http://x/d2"}));
    EXPECT_EQ(store.display("http://x/d1"), "Aspirin");
    EXPECT_EQ(store.display("http://x/d2"), "aspirin");
    EXPECT_EQ(store.display("http://x/d3"), "d3");
    EXPECT_EQ(store.display(Term::literal("raw")), "raw");
    EXPECT_EQ(store.predicates_named("name"), (std::vector<std::string>{"http://x/NAME"}));
}

TEST(TripleStore, ExplicitTypingPredicate) {
    auto store = kg::TripleStore::from_triples({tr("http://x/a", "http://x/kind", Term::iri("http://x/Film")),
                                                tr("http://x/a", "http://x/type", Term::iri("http://x/Other"))},
                                               "http://x/kind");
    EXPECT_EQ(store.types_of("http://x/a").size(), 1u);
    EXPECT_EQ(store.types_of("http://x/a")[0], "Film");
}

TEST(Schema, RowsPerTypeWithoutTypingTriples) {
    auto store = kg::TripleStore::from_triples({
        tr("http://x/d1", kType, Term::iri("http://x/class/Drug")),
        tr("http://x/d1", kType, Term::iri("http://x/class/Compound")),
        tr("http://x/k1", kType, Term::iri("http://x/class/Kingdom")),
        tr("http://x/d1", "http://x/KINGDOM", Term::iri("http://x/k1")),
        tr("http://x/d1", "http://x/NAME", Term::literal("Aspirin")),
        tr("http://x/d1", "http://y/KINGDOM", Term::iri("http://x/orphan")),
    });
    auto schema = kg::extract_schema(store, "http://x/");
    std::vector<std::string> rows;
    for (const auto& b : schema.bgps) rows.push_back(b.subject_type + "," + b.predicate + "," + b.object_type);
    EXPECT_EQ(rows, (std::vector<std::string>{"Compound,KINGDOM,Kingdom", "Compound,KINGDOM,Untyped",
                                              "Compound,NAME,Literal", "Drug,KINGDOM,Kingdom", "Drug,KINGDOM,Untyped",
                                              "Drug,NAME,Literal"}));
    for (const auto& b : schema.bgps) {
        if (b.predicate == "KINGDOM" && b.object_type == "Kingdom") {
            EXPECT_EQ(b.predicate_iri, "http://x/KINGDOM");
        }
        if (b.object_type == "Untyped") {
            EXPECT_EQ(b.predicate_iri, "http://y/KINGDOM");
        }
    }
    EXPECT_EQ(kg::schema_to_csv(schema).substr(0, 28), "Compound, KINGDOM, Kingdom\nC");
}

TEST(Schema, FixtureBioKgHasTheQuestionPatterns) {
    const auto& schema = test::biokg().schema;
    auto has = [&](const char* s, const char* p, const char* o) {
        return std::any_of(schema.bgps.begin(), schema.bgps.end(), [&](const kg::Bgp& b) {
            return b.subject_type == s && b.predicate == p && b.object_type == o;
        });
    };
    EXPECT_TRUE(has("Drug", "NAME", "Literal"));
    EXPECT_TRUE(has("Drug", "KINGDOM", "Kingdom"));
    EXPECT_TRUE(has("Drug", "DDI", "Drug"));
    EXPECT_TRUE(has("Protein", "SPECIES", "Species"));
}
