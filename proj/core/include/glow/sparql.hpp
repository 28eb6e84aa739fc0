#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "glow/error.hpp"
#include "glow/kg_store.hpp"

// The SPARQL subset used for retrieval:
//
//   PREFIX p: <ns>                               (any number)
//   SELECT [DISTINCT] ?v | ?v AS ?a | (?v AS ?a)  (one or more)
//   [WHERE] {
//     VALUES ?v { "lit" <iri> p:x ... }          (any number)
//     s p o [.]                                  (';' and ',' abbreviations allowed)
//   }
//   [LIMIT n]
//
// No OPTIONAL, FILTER, UNION or property paths. Keywords are case-insensitive.
namespace glow::sparql {

struct Variable {
    std::string name;  // without the leading '?'
    auto operator<=>(const Variable&) const = default;
};

using PatternTerm = std::variant<Variable, kg::Term>;

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;
    bool operator==(const TriplePattern&) const = default;
};

struct Projection {
    std::string variable;
    std::optional<std::string> alias;

    const std::string& column() const { return alias ? *alias : variable; }
    bool operator==(const Projection&) const = default;
};

struct ValuesClause {
    std::string variable;
    std::vector<kg::Term> values;
    bool operator==(const ValuesClause&) const = default;
};

struct SparqlQuery {
    std::map<std::string, std::string> prefixes;
    std::vector<Projection> projections;
    std::vector<ValuesClause> values;
    std::vector<TriplePattern> patterns;
    std::optional<std::uint64_t> limit;

    bool operator==(const SparqlQuery&) const = default;
};

class QueryError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public QueryError {
public:
    SyntaxError(std::size_t offset, const std::string& what);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnknownPrefixError : public SyntaxError {
public:
    UnknownPrefixError(std::size_t offset, const std::string& prefix);
};

class UnboundProjectionError : public QueryError {
public:
    explicit UnboundProjectionError(const std::string& variable);
};

SparqlQuery parse(std::string_view text);

/// Canonical text form; `parse(to_string(q)) == q` for every valid query.
std::string to_string(const SparqlQuery& query);

struct ResultSet {
    std::vector<std::string> columns;
    std::vector<std::vector<kg::Term>> rows;

    bool operator==(const ResultSet&) const = default;
};

/// Nested-loop join over the patterns (VALUES clauses act as unary
/// relations). Rows are projected, deduplicated and sorted by their
/// N-Triples spelling; LIMIT is applied last.
ResultSet execute(const SparqlQuery& query, const kg::TripleStore& store);

class EndpointError : public Error {
public:
    enum class Kind { transport, status, malformed };

    EndpointError(Kind kind, std::string url, int status, const std::string& detail);

    Kind kind() const { return kind_; }
    const std::string& url() const { return url_; }
    int status() const { return status_; }

private:
    Kind kind_;
    std::string url_;
    int status_;
};

struct RemoteOptions {
    bool use_post = true;
    std::chrono::milliseconds timeout{30'000};
};

/// Runs `query_text` against a SPARQL-protocol endpoint and maps the
/// SPARQL 1.1 JSON results onto a ResultSet. Unbound cells become empty literals.
ResultSet execute_remote(std::string_view query_text, const std::string& endpoint_url,
                         const RemoteOptions& options = {});

/// Parses a SPARQL 1.1 JSON results document.
ResultSet parse_results_json(std::string_view body);

}  // namespace glow::sparql
