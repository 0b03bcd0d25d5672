#pragma once

// Concrete formula syntax:
//
//   phi  ::= "tt" | "ff" | IDENT | "!" phi | phi "&" phi | phi "|" phi
//          | phi "->" phi | "(" phi ")"
//          | ("E"|"A") "(" phi ("U"|"R") lang? phi ")"
//          | ("EF"|"AF"|"EG"|"AG"|"EX"|"AX") lang? phi
//   lang ::= "[" IDENT "]" | "[" KIND ":" IDENT "]" | "[" "~" IDENT "]" | "[" "re:" REGEX "]"
//
// Precedence ! > & > | > ->, binary operators associate to the right.
// "re:." and "re:.*" are the default languages Σ and Σ*. '#' starts a
// comment; newlines are blanks.

#include <string>
#include <string_view>

#include "ectl/environment.hpp"
#include "ectl/error.hpp"
#include "ectl/formula.hpp"

namespace ectl {

namespace detail {

class FormulaParser {
public:
    FormulaParser(std::string_view text, const Environment* env) : text_(text), env_(env) {}

    FormulaPtr parse() {
        FormulaPtr f = implication();
        skip();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::size_t at = std::string_view::npos) const {
        if (at == std::string_view::npos) at = pos_;
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ValidationError(what, line, col);
    }

    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    bool accept(std::string_view s) {
        skip();
        if (text_.substr(pos_, s.size()) == s) {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view s) {
        if (!accept(s)) fail("expected '" + std::string(s) + "'");
    }

    static bool ident_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    }

    std::string peek_ident() {
        skip();
        std::size_t j = pos_;
        while (j < text_.size() && ident_char(text_[j])) ++j;
        return std::string(text_.substr(pos_, j - pos_));
    }

    FormulaPtr implication() {
        FormulaPtr l = disjunction();
        if (accept("->")) return make::implies(l, implication());
        return l;
    }

    FormulaPtr disjunction() {
        FormulaPtr l = conjunction();
        if (accept("|")) return make::or_(l, disjunction());
        return l;
    }

    FormulaPtr conjunction() {
        FormulaPtr l = unary();
        if (accept("&")) return make::and_(l, conjunction());
        return l;
    }

    FormulaPtr unary() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of formula");
        if (accept("!")) return make::not_(unary());
        if (accept("(")) {
            FormulaPtr f = implication();
            expect(")");
            return f;
        }
        const std::size_t start = pos_;
        const std::string id = peek_ident();
        if (id.empty()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        pos_ += id.size();
        if (id == "tt") return make::tt();
        if (id == "ff") return make::ff();
        if (id == "EF" || id == "AF" || id == "EG" || id == "AG" || id == "EX" || id == "AX") {
            const bool next = id[1] == 'X';
            LanguageRef lang = language(next ? LanguageRef::sigma() : LanguageRef::sigma_star());
            FormulaPtr body = unary();
            if (id == "EF") return make::ef(lang, body);
            if (id == "AF") return make::af(lang, body);
            if (id == "EG") return make::eg(lang, body);
            if (id == "AG") return make::ag(lang, body);
            if (id == "EX") return make::ex(lang, body);
            return make::ax(lang, body);
        }
        if (id == "E" || id == "A") {
            skip();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                ++pos_;
                FormulaPtr l = implication();
                skip();
                const std::string op = peek_ident();
                if (op != "U" && op != "R") fail("expected 'U' or 'R'");
                pos_ += 1;
                LanguageRef lang = language(LanguageRef::sigma_star());
                FormulaPtr r = implication();
                expect(")");
                if (id == "E") return op == "U" ? make::eu(l, lang, r) : make::er(l, lang, r);
                return op == "U" ? make::au(l, lang, r) : make::ar(l, lang, r);
            }
        }
        if (id == "U" || id == "R") fail("'" + id + "' is reserved", start);
        return make::prop(id);
    }

    /// Optional bracketed language; the default when absent.
    LanguageRef language(LanguageRef fallback) {
        skip();
        if (pos_ >= text_.size() || text_[pos_] != '[') return fallback;
        const std::size_t open = pos_;
        const std::size_t close = text_.find(']', pos_);
        if (close == std::string_view::npos) fail("unterminated '['");
        std::string body(text_.substr(pos_ + 1, close - pos_ - 1));
        pos_ = close + 1;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
        };
        LanguageRef ref;
        std::size_t regex_start = std::string_view::npos;
        if (body.rfind("re:", 0) == 0) {
            const std::string pattern = body.substr(3);
            const std::string t = trim(pattern);
            regex_start = open + 4 + std::min(pattern.find_first_not_of(" \t\r\n"), pattern.size());
            if (t == ".") ref = LanguageRef::sigma();
            else if (t == ".*") ref = LanguageRef::sigma_star();
            else ref = LanguageRef::regex(t);
        } else {
            body = trim(body);
            if (!body.empty() && body[0] == '~') {
                const std::string name = trim(body.substr(1));
                if (!is_identifier(name)) fail("invalid automaton name in '[" + body + "]'", open);
                ref = LanguageRef::complement_of(name);
            } else if (auto colon = body.find(':'); colon != std::string::npos) {
                const std::string k = trim(body.substr(0, colon));
                const std::string name = trim(body.substr(colon + 1));
                AutomatonKind kind;
                try {
                    kind = parse_kind(k);
                } catch (const ValidationError&) {
                    fail("unknown automaton kind '" + k + "'", open);
                }
                if (!is_identifier(name)) fail("invalid automaton name '" + name + "'", open);
                ref = LanguageRef::named(name, kind);
            } else {
                if (!is_identifier(body)) fail("invalid automaton name '" + body + "'", open);
                ref = LanguageRef::named(body);
            }
        }
        if (env_) {
            try {
                env_->resolve(ref);
            } catch (const ValidationError& e) {
                // regex errors point into the pattern itself
                if (regex_start != std::string_view::npos && e.column() > 0) fail(e.message(), regex_start + e.column() - 1);
                fail(e.what(), open);
            }
        }
        return ref;
    }

    std::string_view text_;
    const Environment* env_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses and, when an environment is given, resolves every language.
inline FormulaPtr parse_formula(std::string_view text, const Environment& env) {
    return detail::FormulaParser(text, &env).parse();
}

/// Syntax only; languages stay unresolved.
inline FormulaPtr parse_formula(std::string_view text) { return detail::FormulaParser(text, nullptr).parse(); }

} // namespace ectl
