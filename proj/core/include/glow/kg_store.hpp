#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glow/error.hpp"

namespace glow::kg {

enum class TermKind : std::uint8_t { iri, literal };

struct Term {
    TermKind kind = TermKind::iri;
    std::string value;

    static Term iri(std::string v) { return {TermKind::iri, std::move(v)}; }
    static Term literal(std::string v) { return {TermKind::literal, std::move(v)}; }

    bool is_iri() const { return kind == TermKind::iri; }
    bool is_literal() const { return kind == TermKind::literal; }

    auto operator<=>(const Term&) const = default;
};

/// N-Triples spelling of a term: `<iri>` or `"escaped literal"`.
std::string to_ntriples(const Term& t);

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    auto operator<=>(const Triple&) const = default;
};

enum class TripleFormat { ntriples, tsv };
enum class Direction { out, in, both };

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline constexpr std::string_view kUntyped = "Untyped";
inline constexpr std::string_view kLiteralType = "Literal";

/// Immutable, indexed set of triples.
///
/// Subjects, predicates and objects each have an index of positions into
/// `triples()`. Node types come from the typing predicate: either an
/// explicit IRI, or (when empty) any predicate whose local name is "type",
/// which covers rdf:type and custom typing properties alike. Literal values
/// of predicates named name/label/title (case-insensitive) feed the name
/// index and the display strings.
class TripleStore {
public:
    TripleStore() = default;

    static TripleStore from_triples(std::vector<Triple> triples, std::string typing_predicate = {});

    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }
    std::span<const Triple> triples() const { return triples_; }
    const std::string& typing_predicate() const { return typing_predicate_; }

    std::span<const std::uint32_t> with_subject(std::string_view iri) const;
    std::span<const std::uint32_t> with_predicate(std::string_view iri) const;
    std::span<const std::uint32_t> with_object(const Term& object) const;

    bool contains(const Triple& t) const;
    bool has_node(std::string_view iri) const;

    /// Triples with `node` as subject (out), object (in) or either, ordered
    /// by predicate, then counterpart term; outgoing before incoming on ties.
    std::vector<Triple> neighbors(std::string_view node, Direction dir) const;

    bool is_typing_predicate(std::string_view predicate_iri) const;

    /// Type names (local names of the typing objects), sorted. Empty when untyped.
    std::span<const std::string> types_of(std::string_view iri) const;
    std::vector<std::string> nodes_of_type(std::string_view type_name) const;

    /// Node IRIs whose name/label/title equals `name` case-insensitively, sorted.
    std::vector<std::string> nodes_named(std::string_view name) const;

    /// NAME > label > title literal, else the IRI local name; literals verbatim.
    std::string display(const Term& t) const;
    std::string display(std::string_view iri) const;

    /// Every predicate IRI whose local name equals `local` (case-insensitive), sorted.
    std::vector<std::string> predicates_named(std::string_view local) const;

private:
    using Index = std::map<std::string, std::vector<std::uint32_t>, std::less<>>;

    std::vector<Triple> triples_;
    std::string typing_predicate_;
    Index by_subject_;
    Index by_predicate_;
    Index by_object_iri_;
    Index by_object_literal_;
    std::map<std::string, std::vector<std::string>, std::less<>> types_;
    std::map<std::string, std::vector<std::string>, std::less<>> names_;
    std::map<std::string, std::string, std::less<>> display_;
};

TripleStore load_triples(std::istream& in, TripleFormat format, std::string typing_predicate = {});
TripleStore load_triples_file(const std::string& path, TripleFormat format, std::string typing_predicate = {});

void write_ntriples(std::ostream& out, const TripleStore& store);
std::string to_ntriples(const TripleStore& store);

/// One schema row: (subject type, predicate local name, object type).
struct Bgp {
    std::string subject_type;
    std::string predicate;
    std::string object_type;
    /// Full IRI behind `predicate`; smallest one if several share the local name.
    std::string predicate_iri;

    auto operator<=>(const Bgp&) const = default;
};

struct KGSchema {
    std::vector<Bgp> bgps;
    std::string prefix;

    bool empty() const { return bgps.empty(); }
};

/// Distinct (type(s), p, type(o)) signatures, sorted. Multi-typed nodes
/// contribute one row per type; typing triples themselves are not rows.
KGSchema extract_schema(const TripleStore& store, std::string prefix);

/// `<subject-type>, <predicate>, <object-type>` per line.
std::string schema_to_csv(const KGSchema& schema);

}  // namespace glow::kg
