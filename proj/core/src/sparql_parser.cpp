#include <cctype>
#include <set>

#include "glow/sparql.hpp"
#include "glow/text.hpp"

namespace glow::sparql {

SyntaxError::SyntaxError(std::size_t offset, const std::string& what)
    : QueryError("SPARQL syntax error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

UnknownPrefixError::UnknownPrefixError(std::size_t offset, const std::string& prefix)
    : SyntaxError(offset, "unknown prefix '" + prefix + ":'") {}

UnboundProjectionError::UnboundProjectionError(const std::string& variable)
    : QueryError("projected variable ?" + variable + " is not bound by any pattern or VALUES clause") {}

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

enum class Tok { end, iri, pname, var, string, number, word, punct };

struct Token {
    Tok kind = Tok::end;
    std::string text;  // iri without brackets, var without '?', unescaped string, word, punct char
    std::size_t offset = 0;
};

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    Token next() {
        skip();
        Token t;
        t.offset = pos_;
        if (pos_ >= s_.size()) return t;
        char c = s_[pos_];
        if (c == '<') {
            auto end = s_.find('>', pos_ + 1);
            if (end == std::string_view::npos) throw SyntaxError(pos_, "unterminated IRI");
            auto body = s_.substr(pos_ + 1, end - pos_ - 1);
            if (body.find_first_of(" \t\n\r\"{}") != std::string_view::npos) {
                throw SyntaxError(pos_, "invalid character in IRI");
            }
            t.kind = Tok::iri;
            t.text = std::string(body);
            pos_ = end + 1;
            return t;
        }
        if (c == '?' || c == '$') {
            std::size_t b = ++pos_;
            while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
            if (pos_ == b) throw SyntaxError(t.offset, "empty variable name");
            t.kind = Tok::var;
            t.text = std::string(s_.substr(b, pos_ - b));
            return t;
        }
        if (c == '"' || c == '\'') {
            t.kind = Tok::string;
            t.text = string_body(c);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t b = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
                // A '.' directly followed by a non-digit ends the triple, not the number.
                if (s_[pos_] == '.' && (pos_ + 1 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) break;
                ++pos_;
            }
            t.kind = Tok::number;
            t.text = std::string(s_.substr(b, pos_ - b));
            return t;
        }
        if (std::string_view("{}().;,*").find(c) != std::string_view::npos) {
            t.kind = Tok::punct;
            t.text = std::string(1, c);
            ++pos_;
            return t;
        }
        if (is_name_char(c) || c == ':') {
            std::size_t b = pos_;
            while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
            if (pos_ < s_.size() && s_[pos_] == ':') {
                ++pos_;
                while (pos_ < s_.size() && (is_name_char(s_[pos_]) ||
                                            (s_[pos_] == '.' && pos_ + 1 < s_.size() && is_name_char(s_[pos_ + 1])))) {
                    ++pos_;
                }
                t.kind = Tok::pname;
            } else {
                t.kind = Tok::word;
            }
            t.text = std::string(s_.substr(b, pos_ - b));
            return t;
        }
        throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
    }

private:
    void skip() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string string_body(char quote) {
        std::size_t start = pos_++;
        std::string out;
        while (true) {
            if (pos_ >= s_.size()) throw SyntaxError(start, "unterminated string literal");
            char c = s_[pos_++];
            if (c == quote) break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= s_.size()) throw SyntaxError(pos_, "dangling escape");
            char e = s_[pos_++];
            switch (e) {
                case 't': out += '\t'; break;
                case 'n': out += '\n'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case '"': out += '"'; break;
                case '\'': out += '\''; break;
                case '\\': out += '\\'; break;
                default: throw SyntaxError(pos_ - 2, std::string("unknown escape \\") + e);
            }
        }
        // Language tags and datatypes are accepted and dropped.
        if (pos_ < s_.size() && s_[pos_] == '@') {
            ++pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) ++pos_;
        } else if (s_.substr(pos_, 2) == "^^") {
            pos_ += 2;
            Token dt = next();
            if (dt.kind != Tok::iri && dt.kind != Tok::pname) throw SyntaxError(dt.offset, "expected datatype IRI");
        }
        return out;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    SparqlQuery run() {
        while (is_word("PREFIX")) prefix_decl();
        expect_word("SELECT");
        if (is_word("DISTINCT") || is_word("REDUCED")) advance();
        if (is_punct("*")) throw SyntaxError(tok_.offset, "SELECT * is not supported; name the projected variables");
        while (tok_.kind == Tok::var || is_punct("(")) projection();
        if (q_.projections.empty()) throw SyntaxError(tok_.offset, "expected at least one projected variable");
        if (is_word("WHERE")) advance();
        group();
        if (is_word("LIMIT")) {
            advance();
            if (tok_.kind != Tok::number || tok_.text.find('.') != std::string::npos) {
                throw SyntaxError(tok_.offset, "LIMIT expects a non-negative integer");
            }
            auto n = std::stoull(tok_.text);
            q_.limit = n;
            advance();
        }
        if (tok_.kind != Tok::end) throw SyntaxError(tok_.offset, "unexpected trailing '" + tok_.text + "'");
        check_bound();
        return std::move(q_);
    }

private:
    void advance() { tok_ = lexer_.next(); }

    bool is_word(std::string_view w) const { return tok_.kind == Tok::word && text::iequals(tok_.text, w); }
    bool is_punct(std::string_view p) const { return tok_.kind == Tok::punct && tok_.text == p; }

    void expect_word(std::string_view w) {
        if (!is_word(w)) throw SyntaxError(tok_.offset, "expected " + std::string(w));
        advance();
    }

    void expect_punct(std::string_view p) {
        if (!is_punct(p)) throw SyntaxError(tok_.offset, "expected '" + std::string(p) + "'");
        advance();
    }

    std::string expect_var() {
        if (tok_.kind != Tok::var) throw SyntaxError(tok_.offset, "expected a variable");
        auto v = tok_.text;
        advance();
        return v;
    }

    void prefix_decl() {
        advance();
        if (tok_.kind != Tok::pname || tok_.text.back() != ':') {
            throw SyntaxError(tok_.offset, "expected a prefix name ending in ':'");
        }
        auto name = tok_.text.substr(0, tok_.text.size() - 1);
        advance();
        if (tok_.kind != Tok::iri) throw SyntaxError(tok_.offset, "expected namespace IRI");
        q_.prefixes[name] = tok_.text;
        advance();
    }

    void projection() {
        if (is_punct("(")) {
            advance();
            Projection p{expect_var(), std::nullopt};
            expect_word("AS");
            p.alias = expect_var();
            expect_punct(")");
            q_.projections.push_back(std::move(p));
            return;
        }
        Projection p{expect_var(), std::nullopt};
        if (is_word("AS")) {
            advance();
            p.alias = expect_var();
        }
        q_.projections.push_back(std::move(p));
    }

    kg::Term expand(const Token& t) {
        auto colon = t.text.find(':');
        auto prefix = t.text.substr(0, colon);
        auto it = q_.prefixes.find(prefix);
        if (it == q_.prefixes.end()) throw UnknownPrefixError(t.offset, prefix);
        return kg::Term::iri(it->second + t.text.substr(colon + 1));
    }

    kg::Term constant() {
        kg::Term out;
        switch (tok_.kind) {
            case Tok::iri: out = kg::Term::iri(tok_.text); break;
            case Tok::pname: out = expand(tok_); break;
            case Tok::string:
            case Tok::number: out = kg::Term::literal(tok_.text); break;
            default: throw SyntaxError(tok_.offset, "expected an IRI or literal");
        }
        advance();
        return out;
    }

    PatternTerm pattern_term(bool predicate_position) {
        if (tok_.kind == Tok::var) return Variable{expect_var()};
        if (predicate_position && tok_.kind == Tok::word && tok_.text == "a") {
            advance();
            return kg::Term::iri(std::string(kRdfType));
        }
        auto at = tok_.offset;
        auto term = constant();
        if (predicate_position && term.is_literal()) throw SyntaxError(at, "predicate must be an IRI or variable");
        return term;
    }

    void group() {
        expect_punct("{");
        while (!is_punct("}")) {
            if (tok_.kind == Tok::end) throw SyntaxError(tok_.offset, "unterminated group, expected '}'");
            if (is_word("VALUES")) {
                values_clause();
            } else if (is_word("OPTIONAL") || is_word("FILTER") || is_word("UNION") || is_word("MINUS") ||
                       is_word("BIND") || is_word("GRAPH") || is_word("SERVICE")) {
                throw SyntaxError(tok_.offset, tok_.text + " is outside the supported subset");
            } else {
                triples_block();
            }
        }
        advance();
    }

    void values_clause() {
        advance();
        ValuesClause v{expect_var(), {}};
        expect_punct("{");
        while (!is_punct("}")) {
            if (tok_.kind == Tok::end) throw SyntaxError(tok_.offset, "unterminated VALUES block");
            v.values.push_back(constant());
        }
        advance();
        q_.values.push_back(std::move(v));
    }

    void triples_block() {
        auto subject = pattern_term(false);
        while (true) {
            auto predicate = pattern_term(true);
            while (true) {
                q_.patterns.push_back({subject, predicate, pattern_term(false)});
                if (!is_punct(",")) break;
                advance();
            }
            if (!is_punct(";")) break;
            advance();
            if (is_punct(".") || is_punct("}")) break;
        }
        if (is_punct(".")) {
            advance();
        } else if (!is_punct("}")) {
            throw SyntaxError(tok_.offset, "expected '.' or '}' after triple pattern");
        }
    }

    void check_bound() const {
        std::set<std::string> bound;
        for (const auto& v : q_.values) bound.insert(v.variable);
        for (const auto& p : q_.patterns) {
            for (const auto* t : {&p.subject, &p.predicate, &p.object}) {
                if (const auto* v = std::get_if<Variable>(t)) bound.insert(v->name);
            }
        }
        for (const auto& p : q_.projections) {
            if (!bound.count(p.variable)) throw UnboundProjectionError(p.variable);
        }
    }

    Lexer lexer_;
    Token tok_;
    SparqlQuery q_;
};

bool is_plain_local(std::string_view s) {
    if (s.empty() || s.front() == '-' || s.back() == '.') return false;
    for (char c : s) {
        if (!is_name_char(c)) return false;
    }
    return true;
}

std::string escape_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::string render(const kg::Term& t, const std::map<std::string, std::string>& prefixes) {
    if (t.is_literal()) return escape_string(t.value);
    // Longest matching namespace gives the shortest local part.
    const std::pair<const std::string, std::string>* best = nullptr;
    for (const auto& entry : prefixes) {
        if (t.value.size() > entry.second.size() && t.value.compare(0, entry.second.size(), entry.second) == 0 &&
            is_plain_local(std::string_view(t.value).substr(entry.second.size())) &&
            (!best || entry.second.size() > best->second.size())) {
            best = &entry;
        }
    }
    if (best) return best->first + ":" + t.value.substr(best->second.size());
    return "<" + t.value + ">";
}

std::string render(const PatternTerm& t, const std::map<std::string, std::string>& prefixes) {
    if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
    return render(std::get<kg::Term>(t), prefixes);
}

}  // namespace

SparqlQuery parse(std::string_view text) { return Parser(text).run(); }

std::string to_string(const SparqlQuery& q) {
    std::string out;
    for (const auto& [name, ns] : q.prefixes) out += "PREFIX " + name + ": <" + ns + ">\n";
    out += "SELECT";
    for (const auto& p : q.projections) {
        out += p.alias ? " (?" + p.variable + " AS ?" + *p.alias + ")" : " ?" + p.variable;
    }
    out += "\nWHERE {\n";
    for (const auto& v : q.values) {
        out += "  VALUES ?" + v.variable + " {";
        for (const auto& t : v.values) out += " " + render(t, q.prefixes);
        out += " }\n";
    }
    for (const auto& p : q.patterns) {
        out += "  " + render(p.subject, q.prefixes) + " " + render(p.predicate, q.prefixes) + " " +
               render(p.object, q.prefixes) + " .\n";
    }
    out += "}";
    if (q.limit) out += "\nLIMIT " + std::to_string(*q.limit);
    out += "\n";
    return out;
}

}  // namespace glow::sparql
