#pragma once

// Thompson construction for regular expressions over a declared alphabet.
//
//   alt    ::= concat ('|' concat)*
//   concat ::= repeat*
//   repeat ::= atom ('*' | '+' | '?')*
//   atom   ::= letter | '<' name '>' | '.' | '(' alt ')'
//
// A letter is a single character; multi-character letters are written in
// angle brackets. '.' matches any letter. Blanks are ignored. An empty
// branch denotes the empty word.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/error.hpp"

namespace ectl {

namespace detail {

class RegexCompiler {
public:
    RegexCompiler(std::string_view text, FiniteAutomaton& nfa) : text_(text), nfa_(nfa) {}

    struct Fragment {
        AutStateId start;
        AutStateId accept;
    };

    Fragment compile() {
        Fragment f = parse_alt();
        skip_blanks();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("regex: " + what, 1, pos_ + 1);
    }

    void skip_blanks() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    AutStateId fresh() { return nfa_.add_state("r" + std::to_string(nfa_.num_states())); }

    Fragment epsilon() {
        AutStateId s = fresh();
        AutStateId t = fresh();
        nfa_.edges.push_back({s, kEpsilon, t});
        return {s, t};
    }

    Fragment parse_alt() {
        std::vector<Fragment> branches{parse_concat()};
        skip_blanks();
        while (pos_ < text_.size() && text_[pos_] == '|') {
            ++pos_;
            branches.push_back(parse_concat());
            skip_blanks();
        }
        if (branches.size() == 1) return branches.front();
        AutStateId s = fresh();
        AutStateId t = fresh();
        for (const auto& b : branches) {
            nfa_.edges.push_back({s, kEpsilon, b.start});
            nfa_.edges.push_back({b.accept, kEpsilon, t});
        }
        return {s, t};
    }

    Fragment parse_concat() {
        std::vector<Fragment> parts;
        for (;;) {
            skip_blanks();
            if (pos_ >= text_.size() || text_[pos_] == '|' || text_[pos_] == ')') break;
            parts.push_back(parse_repeat());
        }
        if (parts.empty()) return epsilon();
        for (std::size_t i = 1; i < parts.size(); ++i) nfa_.edges.push_back({parts[i - 1].accept, kEpsilon, parts[i].start});
        return {parts.front().start, parts.back().accept};
    }

    Fragment parse_repeat() {
        Fragment f = parse_atom();
        for (;;) {
            skip_blanks();
            if (pos_ >= text_.size()) break;
            char c = text_[pos_];
            if (c != '*' && c != '+' && c != '?') break;
            ++pos_;
            AutStateId s = fresh();
            AutStateId t = fresh();
            nfa_.edges.push_back({s, kEpsilon, f.start});
            nfa_.edges.push_back({f.accept, kEpsilon, t});
            if (c != '+') nfa_.edges.push_back({s, kEpsilon, t});
            if (c != '?') nfa_.edges.push_back({f.accept, kEpsilon, f.start});
            f = {s, t};
        }
        return f;
    }

    Fragment parse_atom() {
        skip_blanks();
        if (pos_ >= text_.size()) fail("unexpected end of pattern");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Fragment f = parse_alt();
            skip_blanks();
            if (pos_ >= text_.size() || text_[pos_] != ')') fail("missing ')'");
            ++pos_;
            return f;
        }
        if (c == '*' || c == '+' || c == '?' || c == ')' || c == '|') fail("unexpected '" + std::string(1, c) + "'");
        AutStateId s = fresh();
        AutStateId t = fresh();
        if (c == '.') {
            ++pos_;
            for (LetterId l = 0; l < nfa_.alphabet.size(); ++l) nfa_.edges.push_back({s, l, t});
            return {s, t};
        }
        std::string letter;
        if (c == '<') {
            auto close = text_.find('>', pos_);
            if (close == std::string_view::npos) fail("missing '>'");
            letter = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
            auto id = nfa_.alphabet.find(letter);
            if (!id) fail("undeclared letter '" + letter + "'");
            pos_ = close + 1;
            nfa_.edges.push_back({s, *id, t});
            return {s, t};
        }
        letter = std::string(1, c);
        auto id = nfa_.alphabet.find(letter);
        if (!id) fail("undeclared letter '" + letter + "'");
        ++pos_;
        nfa_.edges.push_back({s, *id, t});
        return {s, t};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    FiniteAutomaton& nfa_;
};

} // namespace detail

/// Compiles a pattern into an epsilon-NFA with one initial and one final state.
inline FiniteAutomaton regex_to_nfa(std::string_view pattern, const std::vector<std::string>& alphabet,
                                    std::string name = {}) {
    FiniteAutomaton nfa;
    nfa.kind = AutomatonKind::nfa;
    nfa.name = name.empty() ? "re:" + std::string(pattern) : std::move(name);
    for (const auto& l : alphabet) nfa.add_letter(l);
    detail::RegexCompiler compiler(pattern, nfa);
    auto frag = compiler.compile();
    nfa.initial = frag.start;
    nfa.final[frag.accept] = true;
    detail::sort_unique(nfa.edges);
    return nfa;
}

} // namespace ectl
