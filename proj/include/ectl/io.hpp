#pragma once

// Line-oriented text formats for systems (.lts) and automata (.aut).
// Both accept LF or CRLF, treat '#' as a comment to end of line, and report
// errors with line and column. Serializers emit LF and round-trip.

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/error.hpp"
#include "ectl/lts.hpp"

namespace ectl {

namespace detail {

struct Token {
    std::string text;
    std::size_t column; ///< 1-based
};

struct Line {
    std::size_t number; ///< 1-based
    std::vector<Token> tokens;
};

/// Splits into non-empty lines of tokens. '[' and ']' are tokens of their own.
inline std::vector<Line> tokenize_lines(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        Line line{number, {}};
        for (std::size_t i = 0; i < raw.size();) {
            const char c = raw[i];
            if (c == ' ' || c == '\t') {
                ++i;
            } else if (c == '[' || c == ']') {
                line.tokens.push_back({std::string(1, c), i + 1});
                ++i;
            } else {
                std::size_t j = i;
                while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '[' && raw[j] != ']') ++j;
                line.tokens.push_back({std::string(raw.substr(i, j - i)), i + 1});
                i = j;
            }
        }
        if (!line.tokens.empty()) out.push_back(std::move(line));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return out;
}

[[noreturn]] inline void fail_at(const Line& line, std::size_t tok, const std::string& what) {
    const std::size_t col = tok < line.tokens.size() ? line.tokens[tok].column
                                                      : (line.tokens.empty() ? 1 : line.tokens.back().column);
    throw ValidationError(what, line.number, col);
}

inline void require_arity(const Line& line, std::size_t n, const std::string& usage) {
    if (line.tokens.size() != n) fail_at(line, std::min(n, line.tokens.size()), "expected: " + usage);
}

inline void require_ident(const Line& line, std::size_t tok, const char* what) {
    if (!is_identifier(line.tokens[tok].text))
        fail_at(line, tok, std::string("invalid ") + what + " '" + line.tokens[tok].text + "'");
}

/// Re-throws a ValidationError from a model call with this token's position.
template <class Fn>
auto at(const Line& line, std::size_t tok, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        if (e.line() != 0) throw;
        fail_at(line, tok, e.what());
    }
}

inline std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += " " + x;
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Systems

/// Parses the .lts format:
///   system NAME / actions a b / props p q / state s0 [p q] / trans s0 a s1 / init s0
/// Sections may come in any order; every referenced token must be declared.
inline Lts parse_lts(std::string_view text) {
    using namespace detail;
    const auto lines = tokenize_lines(text);
    Lts lts;
    bool named = false;
    // Declarations first so that later directives may refer to them.
    for (const auto& l : lines) {
        const std::string& d = l.tokens[0].text;
        if (d == "system") {
            require_arity(l, 2, "system NAME");
            require_ident(l, 1, "system name");
            if (named) fail_at(l, 0, "duplicate system line");
            lts.set_name(l.tokens[1].text);
            named = true;
        } else if (d == "actions") {
            for (std::size_t i = 1; i < l.tokens.size(); ++i) {
                require_ident(l, i, "action");
                lts.add_action(l.tokens[i].text);
            }
        } else if (d == "props") {
            for (std::size_t i = 1; i < l.tokens.size(); ++i) {
                require_ident(l, i, "proposition");
                lts.add_prop(l.tokens[i].text);
            }
        } else if (d == "state") {
            if (l.tokens.size() < 2) fail_at(l, 1, "expected: state NAME [props]");
            require_ident(l, 1, "state");
            if (lts.states().find(l.tokens[1].text)) fail_at(l, 1, "duplicate state '" + l.tokens[1].text + "'");
            lts.add_state(l.tokens[1].text);
        } else if (d != "trans" && d != "init") {
            fail_at(l, 0, "unknown directive '" + d + "'");
        }
    }
    for (const auto& l : lines) {
        const std::string& d = l.tokens[0].text;
        if (d == "state") {
            const StateId s = lts.state_id(l.tokens[1].text);
            if (l.tokens.size() == 2) continue;
            if (l.tokens[2].text != "[" || l.tokens.back().text != "]" || l.tokens.size() < 4)
                fail_at(l, 2, "expected a bracketed proposition list");
            for (std::size_t i = 3; i + 1 < l.tokens.size(); ++i) {
                auto p = lts.find_prop(l.tokens[i].text);
                if (!p) fail_at(l, i, "undeclared proposition '" + l.tokens[i].text + "'");
                lts.label(s, *p);
            }
        } else if (d == "trans") {
            require_arity(l, 4, "trans SOURCE ACTION TARGET");
            const StateId s = at(l, 1, [&] { return lts.state_id(l.tokens[1].text); });
            const ActionId a = at(l, 2, [&] { return lts.action_id(l.tokens[2].text); });
            const StateId t = at(l, 3, [&] { return lts.state_id(l.tokens[3].text); });
            lts.add_transition(s, a, t);
        } else if (d == "init") {
            if (l.tokens.size() < 2) fail_at(l, 1, "expected: init STATE...");
            for (std::size_t i = 1; i < l.tokens.size(); ++i)
                lts.add_designated(at(l, i, [&] { return lts.state_id(l.tokens[i].text); }));
        }
    }
    return lts;
}

inline std::string serialize_lts(const Lts& lts) {
    std::ostringstream out;
    if (!lts.name().empty()) out << "system " << lts.name() << "\n";
    if (lts.num_actions()) out << "actions" << detail::join(lts.actions().names()) << "\n";
    if (lts.props().size()) out << "props" << detail::join(lts.props().names()) << "\n";
    for (StateId s = 0; s < lts.num_states(); ++s) {
        out << "state " << lts.state_name(s) << " [";
        const auto& ls = lts.labels(s);
        for (std::size_t i = 0; i < ls.size(); ++i) out << (i ? " " : "") << lts.props().name(ls[i]);
        out << "]\n";
    }
    for (const auto& t : lts.transitions())
        out << "trans " << lts.state_name(t.source) << " " << lts.action_name(t.action) << " "
            << lts.state_name(t.target) << "\n";
    for (StateId s : lts.designated()) out << "init " << lts.state_name(s) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Automata

/// Parses the .aut format. `kind` and `name` are required. Finite kinds
/// declare `alphabet` and use `rule q a q'` (letter `eps` for ε); visibly
/// pushdown kinds declare `calls`/`returns`/`internals` and use
/// `rule q a push G q'`, `rule q a pop G q'`, `rule q a q'`; pushdown kinds
/// declare `alphabet` and use `rule q a G -> q' G1 G2` (top first).
inline Automaton parse_aut(std::string_view text) {
    using namespace detail;
    const auto lines = tokenize_lines(text);
    std::optional<AutomatonKind> kind;
    const Line* kind_line = nullptr;
    for (const auto& l : lines)
        if (l.tokens[0].text == "kind") {
            require_arity(l, 2, "kind dfa|nfa|dvpa|vpa|dpda|pda");
            if (kind) fail_at(l, 0, "duplicate kind line");
            kind = at(l, 1, [&] { return parse_kind(l.tokens[1].text); });
            kind_line = &l;
        }
    if (!kind) throw ValidationError("missing 'kind' line", lines.empty() ? 1 : lines.front().number, 1);
    (void)kind_line;
    const bool finite = *kind == AutomatonKind::dfa || *kind == AutomatonKind::nfa;
    const bool visibly = *kind == AutomatonKind::dvpa || *kind == AutomatonKind::vpa;

    std::string name;
    SymbolTable alphabet;
    std::vector<LetterClass> classes;
    std::vector<std::string> states, finals, stack;
    std::optional<std::string> initial, bottom;
    std::vector<const Line*> rules;
    auto once = [](const Line& l, bool seen) {
        if (seen) fail_at(l, 0, "duplicate '" + l.tokens[0].text + "' line");
    };
    // Letters are numbered calls first, then returns, then internals.
    std::vector<std::string> by_class[3];
    std::set<std::string> declared;
    auto letters = [&](const Line& l, LetterClass c) {
        for (std::size_t i = 1; i < l.tokens.size(); ++i) {
            require_ident(l, i, "letter");
            if (finite && l.tokens[i].text == "eps") fail_at(l, i, "'eps' is reserved for the empty word");
            if (!declared.insert(l.tokens[i].text).second)
                fail_at(l, i, "letter '" + l.tokens[i].text + "' declared twice");
            by_class[static_cast<int>(c)].push_back(l.tokens[i].text);
        }
    };
    auto idents = [&](const Line& l, std::vector<std::string>& into, const char* what) {
        for (std::size_t i = 1; i < l.tokens.size(); ++i) {
            require_ident(l, i, what);
            into.push_back(l.tokens[i].text);
        }
    };
    bool seen_name = false, seen_states = false, seen_final = false, seen_stack = false;
    for (const auto& l : lines) {
        const std::string& d = l.tokens[0].text;
        if (d == "kind") continue;
        if (d == "name") {
            require_arity(l, 2, "name NAME");
            require_ident(l, 1, "automaton name");
            once(l, seen_name);
            seen_name = true;
            name = l.tokens[1].text;
        } else if (d == "alphabet" && !visibly) {
            letters(l, LetterClass::internal);
        } else if ((d == "calls" || d == "returns" || d == "internals") && visibly) {
            letters(l, d == "calls" ? LetterClass::call : d == "returns" ? LetterClass::ret : LetterClass::internal);
        } else if (d == "states") {
            once(l, seen_states);
            seen_states = true;
            idents(l, states, "state");
        } else if (d == "initial") {
            require_arity(l, 2, "initial STATE");
            once(l, initial.has_value());
            initial = l.tokens[1].text;
        } else if (d == "final") {
            once(l, seen_final);
            seen_final = true;
            idents(l, finals, "state");
        } else if (d == "stack" && !finite) {
            once(l, seen_stack);
            seen_stack = true;
            idents(l, stack, "stack symbol");
        } else if (d == "bottom" && !finite) {
            require_arity(l, 2, "bottom SYMBOL");
            once(l, bottom.has_value());
            bottom = l.tokens[1].text;
        } else if (d == "rule") {
            rules.push_back(&l);
        } else {
            fail_at(l, 0, "unknown directive '" + d + "' for kind " + std::string(to_string(*kind)));
        }
    }
    for (LetterClass c : {LetterClass::call, LetterClass::ret, LetterClass::internal})
        for (const auto& x : by_class[static_cast<int>(c)]) {
            alphabet.intern(x);
            classes.push_back(c);
        }
    const std::size_t last = lines.empty() ? 1 : lines.back().number;
    if (!seen_name) throw ValidationError("missing 'name' line", last, 1);
    if (!seen_states) throw ValidationError("missing 'states' line", last, 1);
    if (!initial) throw ValidationError("missing 'initial' line", last, 1);
    if (!finite && !bottom) throw ValidationError("missing 'bottom' line", last, 1);

    auto state_table = [&] {
        SymbolTable t;
        for (const auto& s : states) {
            if (t.find(s)) throw ValidationError("state '" + s + "' declared twice");
            t.intern(s);
        }
        return t;
    };
    auto fill_common = [&](auto& a) {
        a.kind = *kind;
        a.name = name;
        a.alphabet = alphabet;
        a.states = state_table();
        a.final.assign(a.states.size(), false);
        auto q0 = a.states.find(*initial);
        if (!q0) throw ValidationError("initial state '" + *initial + "' is not declared");
        a.initial = *q0;
        for (const auto& f : finals) {
            auto q = a.states.find(f);
            if (!q) throw ValidationError("final state '" + f + "' is not declared");
            a.final[*q] = true;
        }
    };
    auto fill_stack = [&](auto& a) {
        for (const auto& g : stack) {
            if (a.stack.find(g)) throw ValidationError("stack symbol '" + g + "' declared twice");
            a.stack.intern(g);
        }
        auto b = a.stack.find(*bottom);
        if (!b) throw ValidationError("bottom symbol '" + *bottom + "' is not a declared stack symbol");
        a.bottom = *b;
    };
    auto state_of = [](const auto& a, const Line& l, std::size_t i) {
        auto q = a.states.find(l.tokens[i].text);
        if (!q) fail_at(l, i, "undeclared state '" + l.tokens[i].text + "'");
        return *q;
    };
    auto letter_of = [](const auto& a, const Line& l, std::size_t i) {
        auto x = a.alphabet.find(l.tokens[i].text);
        if (!x) fail_at(l, i, "undeclared letter '" + l.tokens[i].text + "'");
        return *x;
    };
    auto symbol_of = [](const auto& a, const Line& l, std::size_t i) {
        auto g = a.stack.find(l.tokens[i].text);
        if (!g) fail_at(l, i, "undeclared stack symbol '" + l.tokens[i].text + "'");
        return *g;
    };

    Automaton result;
    if (finite) {
        FiniteAutomaton a;
        fill_common(a);
        for (const Line* lp : rules) {
            const Line& l = *lp;
            require_arity(l, 4, "rule STATE LETTER|eps STATE");
            const AutStateId from = state_of(a, l, 1);
            const LetterId x = l.tokens[2].text == "eps" ? kEpsilon : letter_of(a, l, 2);
            a.add_edge(from, x, state_of(a, l, 3));
        }
        result = std::move(a);
    } else if (visibly) {
        VisiblyPushdownAutomaton a;
        fill_common(a);
        a.letter_class = classes;
        fill_stack(a);
        for (const Line* lp : rules) {
            const Line& l = *lp;
            if (l.tokens.size() < 3) fail_at(l, l.tokens.size(), "incomplete rule");
            const AutStateId from = state_of(a, l, 1);
            const LetterId x = letter_of(a, l, 2);
            switch (a.letter_class[x]) {
            case LetterClass::call:
                require_arity(l, 6, "rule STATE CALL push SYMBOL STATE");
                if (l.tokens[3].text != "push") fail_at(l, 3, "call rules read 'push SYMBOL'");
                at(l, 0, [&] { a.add_call(from, x, state_of(a, l, 5), symbol_of(a, l, 4)); });
                break;
            case LetterClass::ret:
                require_arity(l, 6, "rule STATE RETURN pop SYMBOL STATE");
                if (l.tokens[3].text != "pop") fail_at(l, 3, "return rules read 'pop SYMBOL'");
                at(l, 0, [&] { a.add_return(from, x, symbol_of(a, l, 4), state_of(a, l, 5)); });
                break;
            case LetterClass::internal:
                require_arity(l, 4, "rule STATE INTERNAL STATE");
                at(l, 0, [&] { a.add_internal(from, x, state_of(a, l, 3)); });
                break;
            }
        }
        result = std::move(a);
    } else {
        PushdownAutomaton a;
        fill_common(a);
        fill_stack(a);
        for (const Line* lp : rules) {
            const Line& l = *lp;
            if (l.tokens.size() < 6 || l.tokens[4].text != "->")
                fail_at(l, std::min<std::size_t>(4, l.tokens.size()), "expected: rule STATE LETTER SYMBOL -> STATE SYMBOL...");
            const AutStateId from = state_of(a, l, 1);
            const LetterId x = letter_of(a, l, 2);
            const StackSymbol top = symbol_of(a, l, 3);
            const AutStateId to = state_of(a, l, 5);
            std::vector<StackSymbol> push;
            for (std::size_t i = 6; i < l.tokens.size(); ++i) push.push_back(symbol_of(a, l, i));
            at(l, 0, [&] { a.add_rule(from, x, top, to, std::move(push)); });
        }
        result = std::move(a);
    }
    validate(result);
    return result;
}

namespace detail {
template <class A>
void serialize_header(std::ostringstream& out, const A& a) {
    out << "kind " << to_string(a.kind) << "\n";
    out << "name " << a.name << "\n";
}
template <class A>
void serialize_states(std::ostringstream& out, const A& a) {
    out << "states" << join(a.states.names()) << "\n";
    out << "initial " << a.states.name(a.initial) << "\n";
    out << "final";
    for (AutStateId q = 0; q < a.states.size(); ++q)
        if (a.final[q]) out << " " << a.states.name(q);
    out << "\n";
}
} // namespace detail

namespace detail {
inline std::string identifier_form(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = is_identifier(std::string_view(&c, 1));
        if (ok) out += c;
        else if (!out.empty() && out.back() != '_') out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "x" : out;
}

/// Constructed names such as {q0,q1} or det(A) mapped to distinct identifiers;
/// names that already are identifiers are kept.
inline std::vector<std::string> identifier_names(const std::vector<std::string>& names) {
    std::set<std::string> taken;
    for (const auto& n : names)
        if (is_identifier(n)) taken.insert(n);
    std::vector<std::string> out;
    for (const auto& n : names) {
        if (is_identifier(n)) {
            out.push_back(n);
            continue;
        }
        const std::string base = identifier_form(n);
        std::string candidate = base;
        for (int k = 2; taken.count(candidate); ++k) candidate = base + "_" + std::to_string(k);
        taken.insert(candidate);
        out.push_back(candidate);
    }
    return out;
}

template <class A>
A with_identifier_names(A a) {
    auto rename = [](SymbolTable& t) {
        SymbolTable fresh;
        for (const auto& n : identifier_names(t.names())) fresh.intern(n);
        t = std::move(fresh);
    };
    if (!is_identifier(a.name)) a.name = identifier_form(a.name);
    rename(a.states);
    if constexpr (!std::is_same_v<A, FiniteAutomaton>) rename(a.stack);
    return a;
}
} // namespace detail

/// Every emitted name is an identifier, so the text always parses back.
inline std::string serialize_aut(const Automaton& input) {
    std::ostringstream out;
    std::visit([&](const auto& original) {
        using T = std::decay_t<decltype(original)>;
        const T a = detail::with_identifier_names(original);
        detail::serialize_header(out, a);
        if constexpr (std::is_same_v<T, VisiblyPushdownAutomaton>) {
            for (auto [word, c] : {std::pair{"calls", LetterClass::call}, std::pair{"returns", LetterClass::ret},
                                   std::pair{"internals", LetterClass::internal}}) {
                out << word;
                for (LetterId x : a.letters_of(c)) out << " " << a.alphabet.name(x);
                out << "\n";
            }
        } else {
            out << "alphabet" << detail::join(a.alphabet.names()) << "\n";
        }
        detail::serialize_states(out, a);
        if constexpr (!std::is_same_v<T, FiniteAutomaton>) {
            out << "stack" << detail::join(a.stack.names()) << "\n";
            out << "bottom " << a.stack.name(a.bottom) << "\n";
        }
        auto q = [&](AutStateId s) { return a.states.name(s); };
        auto x = [&](LetterId l) { return a.alphabet.name(l); };
        if constexpr (std::is_same_v<T, FiniteAutomaton>) {
            for (const auto& e : a.edges)
                out << "rule " << q(e.from) << " " << (e.letter == kEpsilon ? "eps" : x(e.letter)) << " " << q(e.to)
                    << "\n";
        } else if constexpr (std::is_same_v<T, VisiblyPushdownAutomaton>) {
            for (const auto& r : a.calls)
                out << "rule " << q(r.from) << " " << x(r.letter) << " push " << a.stack.name(r.push) << " " << q(r.to)
                    << "\n";
            for (const auto& r : a.returns)
                out << "rule " << q(r.from) << " " << x(r.letter) << " pop " << a.stack.name(r.top) << " " << q(r.to)
                    << "\n";
            for (const auto& r : a.internals) out << "rule " << q(r.from) << " " << x(r.letter) << " " << q(r.to) << "\n";
        } else {
            for (const auto& r : a.rules) {
                out << "rule " << q(r.from) << " " << x(r.letter) << " " << a.stack.name(r.top) << " -> " << q(r.to);
                for (auto g : r.push) out << " " << a.stack.name(g);
                out << "\n";
            }
        }
    }, input);
    return out.str();
}

} // namespace ectl
