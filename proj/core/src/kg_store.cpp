#include "glow/kg_store.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "glow/text.hpp"

namespace glow::kg {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string to_ntriples(const Term& t) {
    if (t.is_iri()) return "<" + t.value + ">";
    std::string out = "\"";
    for (char c : t.value) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

namespace {

const std::array<std::string_view, 3> kNameLocals = {"name", "label", "title"};

// Lower rank wins when picking a display string.
std::optional<int> name_rank(std::string_view predicate_iri) {
    auto local = text::local_name(predicate_iri);
    for (std::size_t i = 0; i < kNameLocals.size(); ++i) {
        if (text::iequals(local, kNameLocals[i])) return static_cast<int>(i);
    }
    return std::nullopt;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class LineParser {
public:
    LineParser(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    }

    bool at_end_or_comment() {
        skip_ws();
        return pos_ >= s_.size() || s_[pos_] == '#';
    }

    Term term() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of line");
        char c = s_[pos_];
        if (c == '<') return Term::iri(iri());
        if (c == '"') return Term::literal(literal());
        if (c == '_' && pos_ + 1 < s_.size() && s_[pos_ + 1] == ':') fail("blank nodes are not supported");
        fail(std::string("unexpected character '") + c + "'");
    }

    void expect_dot() {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected '.' terminating the triple");
        ++pos_;
        if (!at_end_or_comment()) fail("trailing content after '.'");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

private:
    std::string iri() {
        auto end = s_.find('>', pos_ + 1);
        if (end == std::string_view::npos) fail("unterminated IRI");
        std::string v(s_.substr(pos_ + 1, end - pos_ - 1));
        if (v.empty()) fail("empty IRI");
        if (v.find_first_of(" \t\"") != std::string::npos) fail("invalid character in IRI");
        pos_ = end + 1;
        return v;
    }

    std::string literal() {
        std::string out;
        ++pos_;
        while (true) {
            if (pos_ >= s_.size()) fail("unterminated literal");
            char c = s_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= s_.size()) fail("dangling escape");
            char e = s_[pos_++];
            switch (e) {
                case 't': out += '\t'; break;
                case 'b': out += '\b'; break;
                case 'n': out += '\n'; break;
                case 'r': out += '\r'; break;
                case 'f': out += '\f'; break;
                case '"': out += '"'; break;
                case '\'': out += '\''; break;
                case '\\': out += '\\'; break;
                case 'u':
                case 'U': {
                    std::size_t n = e == 'u' ? 4 : 8;
                    if (pos_ + n > s_.size()) fail("short unicode escape");
                    std::uint32_t cp = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        char h = s_[pos_ + i];
                        cp <<= 4;
                        if (h >= '0' && h <= '9') cp |= h - '0';
                        else if (h >= 'a' && h <= 'f') cp |= h - 'a' + 10;
                        else if (h >= 'A' && h <= 'F') cp |= h - 'A' + 10;
                        else fail("bad unicode escape");
                    }
                    pos_ += n;
                    append_utf8(out, cp);
                    break;
                }
                default: fail(std::string("unknown escape \\") + e);
            }
        }
        // Language tags and datatypes are accepted and dropped.
        if (pos_ < s_.size() && s_[pos_] == '@') {
            while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '.') ++pos_;
        } else if (s_.substr(pos_, 2) == "^^") {
            pos_ += 2;
            if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected datatype IRI");
            iri();
        }
        return out;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

Triple parse_ntriples_line(std::string_view line, std::size_t line_no, bool& blank) {
    LineParser p(line, line_no);
    blank = p.at_end_or_comment();
    if (blank) return {};
    Triple t{p.term(), p.term(), p.term()};
    if (!t.subject.is_iri()) p.fail("subject must be an IRI");
    if (!t.predicate.is_iri()) p.fail("predicate must be an IRI");
    p.expect_dot();
    return t;
}

Term tsv_term(std::string_view raw) {
    auto v = text::trim(raw);
    if (v.size() >= 2 && v.front() == '<' && v.back() == '>') return Term::iri(v.substr(1, v.size() - 2));
    return Term::literal(std::move(v));
}

Triple parse_tsv_line(std::string_view line, std::size_t line_no, bool& blank) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    blank = text::trim(line).empty() || line.front() == '#';
    if (blank) return {};
    auto cols = text::split(line, '\t');
    if (cols.size() != 3) {
        throw ParseError(line_no, "expected 3 tab-separated columns, got " + std::to_string(cols.size()));
    }
    Triple t{tsv_term(cols[0]), tsv_term(cols[1]), tsv_term(cols[2])};
    if (!t.subject.is_iri()) throw ParseError(line_no, "subject must be an <IRI>");
    if (!t.predicate.is_iri()) throw ParseError(line_no, "predicate must be an <IRI>");
    return t;
}

template <class Map>
std::span<const std::uint32_t> lookup(const Map& m, std::string_view key) {
    auto it = m.find(key);
    if (it == m.end()) return {};
    return it->second;
}

}  // namespace

TripleStore TripleStore::from_triples(std::vector<Triple> triples, std::string typing_predicate) {
    TripleStore s;
    s.typing_predicate_ = std::move(typing_predicate);
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    s.triples_ = std::move(triples);

    std::map<std::string, std::pair<int, std::string>, std::less<>> best_name;
    for (std::uint32_t i = 0; i < s.triples_.size(); ++i) {
        const auto& t = s.triples_[i];
        s.by_subject_[t.subject.value].push_back(i);
        s.by_predicate_[t.predicate.value].push_back(i);
        (t.object.is_iri() ? s.by_object_iri_ : s.by_object_literal_)[t.object.value].push_back(i);

        if (s.is_typing_predicate(t.predicate.value)) {
            auto type = t.object.is_iri() ? std::string(text::local_name(t.object.value)) : t.object.value;
            s.types_[t.subject.value].push_back(std::move(type));
        }
        if (t.object.is_literal()) {
            if (auto rank = name_rank(t.predicate.value)) {
                auto key = text::to_lower(text::trim(t.object.value));
                if (!key.empty()) s.names_[key].push_back(t.subject.value);
                auto [it, inserted] = best_name.try_emplace(t.subject.value, *rank, t.object.value);
                if (!inserted && std::tie(*rank, t.object.value) < std::tie(it->second.first, it->second.second)) {
                    it->second = {*rank, t.object.value};
                }
            }
        }
    }
    for (auto* m : {&s.types_, &s.names_}) {
        for (auto& [_, v] : *m) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    }
    for (auto& [iri, entry] : best_name) s.display_.emplace(iri, std::move(entry.second));
    return s;
}

std::span<const std::uint32_t> TripleStore::with_subject(std::string_view iri) const {
    return lookup(by_subject_, iri);
}

std::span<const std::uint32_t> TripleStore::with_predicate(std::string_view iri) const {
    return lookup(by_predicate_, iri);
}

std::span<const std::uint32_t> TripleStore::with_object(const Term& object) const {
    return lookup(object.is_iri() ? by_object_iri_ : by_object_literal_, object.value);
}

bool TripleStore::contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
}

bool TripleStore::has_node(std::string_view iri) const {
    return by_subject_.count(iri) > 0 || by_object_iri_.count(iri) > 0;
}

std::vector<Triple> TripleStore::neighbors(std::string_view node, Direction dir) const {
    // (predicate, counterpart, incoming?) orders the result.
    std::vector<std::tuple<const Term*, const Term*, bool, std::uint32_t>> keyed;
    if (dir != Direction::in) {
        for (auto i : with_subject(node)) keyed.emplace_back(&triples_[i].predicate, &triples_[i].object, false, i);
    }
    if (dir != Direction::out) {
        for (auto i : lookup(by_object_iri_, node)) {
            // A self-loop is already present from the outgoing side.
            if (dir == Direction::both && triples_[i].subject.value == node) continue;
            keyed.emplace_back(&triples_[i].predicate, &triples_[i].subject, true, i);
        }
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        const auto& [pa, ca, ia, xa] = a;
        const auto& [pb, cb, ib, xb] = b;
        if (*pa != *pb) return *pa < *pb;
        if (*ca != *cb) return *ca < *cb;
        if (ia != ib) return ib;
        return xa < xb;
    });
    std::vector<Triple> out;
    out.reserve(keyed.size());
    for (const auto& k : keyed) out.push_back(triples_[std::get<3>(k)]);
    return out;
}

bool TripleStore::is_typing_predicate(std::string_view predicate_iri) const {
    if (!typing_predicate_.empty()) return predicate_iri == typing_predicate_;
    return text::iequals(text::local_name(predicate_iri), "type");
}

std::span<const std::string> TripleStore::types_of(std::string_view iri) const {
    auto it = types_.find(iri);
    if (it == types_.end()) return {};
    return it->second;
}

std::vector<std::string> TripleStore::nodes_of_type(std::string_view type_name) const {
    std::vector<std::string> out;
    for (const auto& [node, types] : types_) {
        if (std::find(types.begin(), types.end(), type_name) != types.end()) out.push_back(node);
    }
    return out;
}

std::vector<std::string> TripleStore::nodes_named(std::string_view name) const {
    auto it = names_.find(text::to_lower(text::trim(name)));
    if (it == names_.end()) return {};
    return it->second;
}

std::string TripleStore::display(const Term& t) const {
    return t.is_literal() ? t.value : display(std::string_view(t.value));
}

std::string TripleStore::display(std::string_view iri) const {
    auto it = display_.find(iri);
    if (it != display_.end()) return it->second;
    return std::string(text::local_name(iri));
}

std::vector<std::string> TripleStore::predicates_named(std::string_view local) const {
    std::vector<std::string> out;
    for (const auto& [p, _] : by_predicate_) {
        if (text::iequals(text::local_name(p), local)) out.push_back(p);
    }
    return out;
}

TripleStore load_triples(std::istream& in, TripleFormat format, std::string typing_predicate) {
    std::vector<Triple> triples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = false;
        auto t = format == TripleFormat::ntriples ? parse_ntriples_line(line, line_no, blank)
                                                  : parse_tsv_line(line, line_no, blank);
        if (!blank) triples.push_back(std::move(t));
    }
    return TripleStore::from_triples(std::move(triples), std::move(typing_predicate));
}

TripleStore load_triples_file(const std::string& path, TripleFormat format, std::string typing_predicate) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open triples file " + path);
    return load_triples(in, format, std::move(typing_predicate));
}

void write_ntriples(std::ostream& out, const TripleStore& store) {
    for (const auto& t : store.triples()) {
        out << to_ntriples(t.subject) << ' ' << to_ntriples(t.predicate) << ' ' << to_ntriples(t.object) << " .\n";
    }
}

std::string to_ntriples(const TripleStore& store) {
    std::ostringstream os;
    write_ntriples(os, store);
    return os.str();
}

KGSchema extract_schema(const TripleStore& store, std::string prefix) {
    const std::vector<std::string> untyped{std::string(kUntyped)};
    auto types_or_untyped = [&](std::string_view iri) {
        auto t = store.types_of(iri);
        return t.empty() ? std::span<const std::string>(untyped) : t;
    };

    std::map<std::tuple<std::string, std::string, std::string>, std::string> iri_of;
    for (const auto& t : store.triples()) {
        if (store.is_typing_predicate(t.predicate.value)) continue;
        std::string pred(text::local_name(t.predicate.value));
        for (const auto& st : types_or_untyped(t.subject.value)) {
            if (t.object.is_literal()) {
                auto key = std::make_tuple(st, pred, std::string(kLiteralType));
                auto [it, ins] = iri_of.try_emplace(key, t.predicate.value);
                if (!ins && t.predicate.value < it->second) it->second = t.predicate.value;
                continue;
            }
            for (const auto& ot : types_or_untyped(t.object.value)) {
                auto key = std::make_tuple(st, pred, ot);
                auto [it, ins] = iri_of.try_emplace(key, t.predicate.value);
                if (!ins && t.predicate.value < it->second) it->second = t.predicate.value;
            }
        }
    }
    KGSchema schema;
    schema.prefix = std::move(prefix);
    schema.bgps.reserve(iri_of.size());
    // Keyed on (s, p, o): rows come out sorted and distinct.
    for (auto& [key, iri] : iri_of) {
        auto& [s, p, o] = key;
        schema.bgps.push_back(Bgp{s, p, o, iri});
    }
    return schema;
}

std::string schema_to_csv(const KGSchema& schema) {
    std::string out;
    for (const auto& b : schema.bgps) {
        out += b.subject_type;
        out += ", ";
        out += b.predicate;
        out += ", ";
        out += b.object_type;
        out += '\n';
    }
    return out;
}

}  // namespace glow::kg
