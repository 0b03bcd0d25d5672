#pragma once

// Formula AST for CTL with automaton-annotated until/release operators.
//
// Core connectives are Prop, True, False, Not, And, Or, EU and ER; every
// other constructor is sugar removed by desugar().

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ectl/automata.hpp"

namespace ectl {

/// The language annotating a temporal operator.
struct LanguageRef {
    enum class Kind {
        named,      ///< automaton from the environment
        complement, ///< complement of a named automaton
        regex,      ///< inline pattern over the system's actions
        sigma,      ///< one-letter words (default for X)
        sigma_star, ///< all words (default for U, R, F, G)
    };

    Kind kind = Kind::sigma_star;
    std::string text;                          ///< automaton name or pattern
    std::optional<AutomatonKind> expected_kind; ///< from a "kind:" prefix

    static LanguageRef named(std::string name, std::optional<AutomatonKind> k = std::nullopt) {
        return {Kind::named, std::move(name), k};
    }
    static LanguageRef complement_of(std::string name) { return {Kind::complement, std::move(name), std::nullopt}; }
    static LanguageRef regex(std::string pattern) { return {Kind::regex, std::move(pattern), std::nullopt}; }
    static LanguageRef sigma() { return {Kind::sigma, {}, std::nullopt}; }
    static LanguageRef sigma_star() { return {Kind::sigma_star, {}, std::nullopt}; }

    /// Identity of the resolved automaton in the environment.
    std::string key() const {
        switch (kind) {
        case Kind::named: return text;
        case Kind::complement: return "~" + text;
        case Kind::regex: return "re:" + text;
        case Kind::sigma: return "<sigma>";
        case Kind::sigma_star: return "<sigma*>";
        }
        return {};
    }

    /// Bracketed concrete syntax; Σ and Σ* print as regexes.
    std::string bracket() const {
        switch (kind) {
        case Kind::named:
            return "[" + (expected_kind ? std::string(to_string(*expected_kind)) + ":" : std::string()) + text + "]";
        case Kind::complement: return "[~" + text + "]";
        case Kind::regex: return "[re:" + text + "]";
        case Kind::sigma: return "[re:.]";
        case Kind::sigma_star: return "[re:.*]";
        }
        return {};
    }

    friend bool operator==(const LanguageRef& a, const LanguageRef& b) { return a.key() == b.key(); }
};

enum class Op { prop, tt, ff, not_, and_, or_, implies, eu, er, au, ar, ef, af, eg, ag, ex, ax };

inline bool is_temporal(Op op) { return op >= Op::eu; }
inline bool is_binary_temporal(Op op) { return op == Op::eu || op == Op::er || op == Op::au || op == Op::ar; }
inline bool is_unary_temporal(Op op) { return op >= Op::ef; }

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
public:
    Formula(Op op, std::string prop, LanguageRef lang, FormulaPtr left, FormulaPtr right)
        : op_(op), prop_(std::move(prop)), lang_(std::move(lang)), left_(std::move(left)), right_(std::move(right)) {}

    Op op() const noexcept { return op_; }
    const std::string& prop() const noexcept { return prop_; }
    const LanguageRef& lang() const noexcept { return lang_; }
    /// Only operand of unary connectives; left operand of binary ones.
    const FormulaPtr& left() const noexcept { return left_; }
    const FormulaPtr& right() const noexcept { return right_; }

    std::vector<FormulaPtr> children() const {
        std::vector<FormulaPtr> out;
        if (left_) out.push_back(left_);
        if (right_) out.push_back(right_);
        return out;
    }

private:
    Op op_;
    std::string prop_;
    LanguageRef lang_;
    FormulaPtr left_;
    FormulaPtr right_;
};

namespace make {
inline FormulaPtr node(Op op, FormulaPtr l = nullptr, FormulaPtr r = nullptr, LanguageRef lang = {}) {
    return std::make_shared<const Formula>(op, std::string(), std::move(lang), std::move(l), std::move(r));
}
inline FormulaPtr prop(std::string name) {
    return std::make_shared<const Formula>(Op::prop, std::move(name), LanguageRef{}, nullptr, nullptr);
}
inline FormulaPtr tt() { return node(Op::tt); }
inline FormulaPtr ff() { return node(Op::ff); }
inline FormulaPtr not_(FormulaPtr f) { return node(Op::not_, std::move(f)); }
inline FormulaPtr and_(FormulaPtr a, FormulaPtr b) { return node(Op::and_, std::move(a), std::move(b)); }
inline FormulaPtr or_(FormulaPtr a, FormulaPtr b) { return node(Op::or_, std::move(a), std::move(b)); }
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return node(Op::implies, std::move(a), std::move(b)); }
inline FormulaPtr eu(FormulaPtr a, LanguageRef l, FormulaPtr b) { return node(Op::eu, std::move(a), std::move(b), std::move(l)); }
inline FormulaPtr er(FormulaPtr a, LanguageRef l, FormulaPtr b) { return node(Op::er, std::move(a), std::move(b), std::move(l)); }
inline FormulaPtr au(FormulaPtr a, LanguageRef l, FormulaPtr b) { return node(Op::au, std::move(a), std::move(b), std::move(l)); }
inline FormulaPtr ar(FormulaPtr a, LanguageRef l, FormulaPtr b) { return node(Op::ar, std::move(a), std::move(b), std::move(l)); }
inline FormulaPtr ef(LanguageRef l, FormulaPtr f) { return node(Op::ef, std::move(f), nullptr, std::move(l)); }
inline FormulaPtr af(LanguageRef l, FormulaPtr f) { return node(Op::af, std::move(f), nullptr, std::move(l)); }
inline FormulaPtr eg(LanguageRef l, FormulaPtr f) { return node(Op::eg, std::move(f), nullptr, std::move(l)); }
inline FormulaPtr ag(LanguageRef l, FormulaPtr f) { return node(Op::ag, std::move(f), nullptr, std::move(l)); }
inline FormulaPtr ex(LanguageRef l, FormulaPtr f) { return node(Op::ex, std::move(f), nullptr, std::move(l)); }
inline FormulaPtr ax(LanguageRef l, FormulaPtr f) { return node(Op::ax, std::move(f), nullptr, std::move(l)); }
// Unannotated forms.
inline FormulaPtr ef(FormulaPtr f) { return ef(LanguageRef::sigma_star(), std::move(f)); }
inline FormulaPtr af(FormulaPtr f) { return af(LanguageRef::sigma_star(), std::move(f)); }
inline FormulaPtr eg(FormulaPtr f) { return eg(LanguageRef::sigma_star(), std::move(f)); }
inline FormulaPtr ag(FormulaPtr f) { return ag(LanguageRef::sigma_star(), std::move(f)); }
inline FormulaPtr ex(FormulaPtr f) { return ex(LanguageRef::sigma(), std::move(f)); }
inline FormulaPtr ax(FormulaPtr f) { return ax(LanguageRef::sigma(), std::move(f)); }
} // namespace make

// ---------------------------------------------------------------------------
// Printing

namespace detail {
inline std::string unary_name(Op op) {
    switch (op) {
    case Op::ef: return "EF";
    case Op::af: return "AF";
    case Op::eg: return "EG";
    case Op::ag: return "AG";
    case Op::ex: return "EX";
    case Op::ax: return "AX";
    default: return "?";
    }
}

inline bool is_default_lang(Op op, const LanguageRef& l) {
    if (op == Op::ex || op == Op::ax) return l.kind == LanguageRef::Kind::sigma;
    return l.kind == LanguageRef::Kind::sigma_star;
}
} // namespace detail

/// Fully parenthesized concrete syntax; parse(to_string(f)) == f.
inline std::string to_string(const Formula& f) {
    auto sub = [](const FormulaPtr& p) { return to_string(*p); };
    auto lang = [&](void) { return detail::is_default_lang(f.op(), f.lang()) ? std::string() : f.lang().bracket(); };
    switch (f.op()) {
    case Op::prop: return f.prop();
    case Op::tt: return "tt";
    case Op::ff: return "ff";
    case Op::not_: return "!" + sub(f.left());
    case Op::and_: return "(" + sub(f.left()) + " & " + sub(f.right()) + ")";
    case Op::or_: return "(" + sub(f.left()) + " | " + sub(f.right()) + ")";
    case Op::implies: return "(" + sub(f.left()) + " -> " + sub(f.right()) + ")";
    case Op::eu: return "E(" + sub(f.left()) + " U" + lang() + " " + sub(f.right()) + ")";
    case Op::er: return "E(" + sub(f.left()) + " R" + lang() + " " + sub(f.right()) + ")";
    case Op::au: return "A(" + sub(f.left()) + " U" + lang() + " " + sub(f.right()) + ")";
    case Op::ar: return "A(" + sub(f.left()) + " R" + lang() + " " + sub(f.right()) + ")";
    default: {
        std::string l = lang();
        return detail::unary_name(f.op()) + (l.empty() ? " " : l + " ") + sub(f.left());
    }
    }
}
inline std::string to_string(const FormulaPtr& f) { return to_string(*f); }

/// Structural equality; languages compare by resolved automaton identity.
inline bool equal(const Formula& a, const Formula& b) {
    if (a.op() != b.op()) return false;
    if (a.op() == Op::prop) return a.prop() == b.prop();
    if (is_temporal(a.op()) && !(a.lang() == b.lang())) return false;
    auto eq = [](const FormulaPtr& x, const FormulaPtr& y) {
        if (!x || !y) return !x && !y;
        return equal(*x, *y);
    };
    return eq(a.left(), b.left()) && eq(a.right(), b.right());
}

// ---------------------------------------------------------------------------
// Desugaring

namespace detail {
inline FormulaPtr negate(const FormulaPtr& f) {
    if (f->op() == Op::tt) return make::ff();
    if (f->op() == Op::ff) return make::tt();
    return make::not_(f);
}
} // namespace detail

/// Rewrites into the core connectives:
///   A(f U[L] g) = !E(!f R[L] !g)      A(f R[L] g) = !E(!f U[L] !g)
///   QF[L] f     = Q(tt U[L] f)        QG[L] f     = Q(ff R[L] f)
///   QX[L] f     = QF[L] f  (L defaults to Σ)
/// Negated constants fold (!tt = ff); nothing else is simplified.
inline FormulaPtr desugar(const FormulaPtr& f) {
    using namespace make;
    switch (f->op()) {
    case Op::prop:
    case Op::tt:
    case Op::ff: return f;
    case Op::not_: return not_(desugar(f->left()));
    case Op::and_: return and_(desugar(f->left()), desugar(f->right()));
    case Op::or_: return or_(desugar(f->left()), desugar(f->right()));
    case Op::implies: return or_(not_(desugar(f->left())), desugar(f->right()));
    case Op::eu: return eu(desugar(f->left()), f->lang(), desugar(f->right()));
    case Op::er: return er(desugar(f->left()), f->lang(), desugar(f->right()));
    case Op::au:
        return not_(er(detail::negate(desugar(f->left())), f->lang(), detail::negate(desugar(f->right()))));
    case Op::ar:
        return not_(eu(detail::negate(desugar(f->left())), f->lang(), detail::negate(desugar(f->right()))));
    case Op::ef:
    case Op::ex: return eu(tt(), f->lang(), desugar(f->left()));
    case Op::eg: return er(ff(), f->lang(), desugar(f->left()));
    case Op::af: return desugar(au(tt(), f->lang(), f->left()));
    // AX is the box dual of EX; read through AF it would fail at every dead end.
    case Op::ax: return not_(eu(tt(), f->lang(), detail::negate(desugar(f->left()))));
    case Op::ag: return desugar(ar(ff(), f->lang(), f->left()));
    }
    return f;
}

inline bool is_core(const Formula& f) {
    switch (f.op()) {
    case Op::prop:
    case Op::tt:
    case Op::ff: return true;
    case Op::not_: return is_core(*f.left());
    case Op::and_:
    case Op::or_:
    case Op::eu:
    case Op::er: return is_core(*f.left()) && is_core(*f.right());
    default: return false;
    }
}

/// Maximum nesting depth of temporal operators.
inline std::size_t temporal_depth(const Formula& f) {
    std::size_t d = 0;
    for (const auto& c : f.children()) d = std::max(d, temporal_depth(*c));
    return d + (is_temporal(f.op()) ? 1 : 0);
}

/// Every language reference in the formula, in pre-order.
inline void collect_languages(const Formula& f, std::vector<LanguageRef>& out) {
    if (is_temporal(f.op())) out.push_back(f.lang());
    for (const auto& c : f.children()) collect_languages(*c, out);
}

/// Only the default languages Σ and Σ* occur.
inline bool is_plain_ctl(const Formula& f) {
    if (is_temporal(f.op()) && f.lang().kind != LanguageRef::Kind::sigma &&
        f.lang().kind != LanguageRef::Kind::sigma_star)
        return false;
    for (const auto& c : f.children())
        if (!is_plain_ctl(*c)) return false;
    return true;
}

} // namespace ectl
