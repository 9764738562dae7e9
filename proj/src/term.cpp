#include "mugame/term.hpp"

#include "mugame/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace mugame {

namespace {

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

void require_name(const std::string& s) {
    if (!valid_name(s))
        throw ValidationError("invalid variable name '" + s + "'");
}

TermPtr make_term(TermKind kind, std::string name, std::vector<TermPtr> children) {
    struct Access : Term {
        Access(TermKind k, std::string n, std::vector<TermPtr> c)
            : Term(k, std::move(n), std::move(c)) {}
    };
    return std::make_shared<Access>(kind, std::move(name), std::move(children));
}

} // namespace

TermPtr Term::var(std::string name) {
    require_name(name);
    return make_term(TermKind::Var, std::move(name), {});
}

TermPtr Term::prod(std::vector<TermPtr> children) {
    for (const auto& c : children)
        if (!c) throw ValidationError("null child in prod");
    return make_term(TermKind::Prod, "", std::move(children));
}

TermPtr Term::coprod(std::vector<TermPtr> children) {
    for (const auto& c : children)
        if (!c) throw ValidationError("null child in coprod");
    return make_term(TermKind::Coprod, "", std::move(children));
}

TermPtr Term::mu(std::string binder, TermPtr body) {
    require_name(binder);
    if (!body) throw ValidationError("null body in mu");
    return make_term(TermKind::Mu, std::move(binder), {std::move(body)});
}

TermPtr Term::nu(std::string binder, TermPtr body) {
    require_name(binder);
    if (!body) throw ValidationError("null body in nu");
    return make_term(TermKind::Nu, std::move(binder), {std::move(body)});
}

std::vector<std::string> Term::compute_free(TermKind kind, const std::string& name,
                                            const std::vector<TermPtr>& children) {
    switch (kind) {
    case TermKind::Var:
        return {name};
    case TermKind::Prod:
    case TermKind::Coprod: {
        if (children.size() == 1) return children.front()->free_names();
        std::set<std::string> acc;
        for (const auto& c : children)
            acc.insert(c->free_names().begin(), c->free_names().end());
        return {acc.begin(), acc.end()};
    }
    case TermKind::Mu:
    case TermKind::Nu: {
        std::vector<std::string> out = children.front()->free_names();
        auto it = std::lower_bound(out.begin(), out.end(), name);
        if (it != out.end() && *it == name) out.erase(it);
        return out;
    }
    }
    throw InternalError("compute_free: unreachable");
}

bool Term::mentions(const std::string& var) const {
    return std::binary_search(free_set_.begin(), free_set_.end(), var);
}

namespace {

void collect_free(const TermPtr& t, std::set<std::string>& bound,
                  std::vector<std::string>& order, std::set<std::string>& seen) {
    switch (t->kind()) {
    case TermKind::Var:
        if (!bound.count(t->name()) && seen.insert(t->name()).second)
            order.push_back(t->name());
        break;
    case TermKind::Prod:
    case TermKind::Coprod:
        for (const auto& c : t->children()) collect_free(c, bound, order, seen);
        break;
    case TermKind::Mu:
    case TermKind::Nu: {
        bool fresh = bound.insert(t->name()).second;
        collect_free(t->body(), bound, order, seen);
        if (fresh) bound.erase(t->name());
        break;
    }
    }
}

} // namespace

std::vector<std::string> free_vars(const TermPtr& t) {
    std::vector<std::string> order;
    std::set<std::string> bound, seen;
    collect_free(t, bound, order, seen);
    return order;
}

namespace {

std::string strip_digits(const std::string& s) {
    std::size_t end = s.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(s[end - 1]))) --end;
    return end == 0 ? std::string("v") : s.substr(0, end);
}

std::string fresh_name(const std::string& base, std::set<std::string>& taken) {
    std::string stem = strip_digits(base);
    for (unsigned k = 0;; ++k) {
        std::string candidate = stem + std::to_string(k);
        if (taken.insert(candidate).second) return candidate;
    }
}

} // namespace

TermPtr substitute(const TermPtr& t, const std::string& var, const TermPtr& replacement) {
    // Subtrees without the variable are returned as-is, so substitution
    // only rebuilds the spine above actual occurrences and the result
    // shares everything else with the input.
    if (!t->mentions(var)) return t;
    switch (t->kind()) {
    case TermKind::Var:
        return replacement;
    case TermKind::Prod:
    case TermKind::Coprod: {
        std::vector<TermPtr> out;
        out.reserve(t->children().size());
        for (const auto& c : t->children()) out.push_back(substitute(c, var, replacement));
        return t->kind() == TermKind::Prod ? Term::prod(std::move(out))
                                           : Term::coprod(std::move(out));
    }
    case TermKind::Mu:
    case TermKind::Nu: {
        std::string binder = t->name();
        TermPtr body = t->body();
        if (replacement->mentions(binder)) {
            std::set<std::string> taken(replacement->free_names().begin(),
                                        replacement->free_names().end());
            taken.insert(body->free_names().begin(), body->free_names().end());
            taken.insert(var);
            std::string renamed = fresh_name(binder, taken);
            body = substitute(body, binder, Term::var(renamed));
            binder = renamed;
        }
        TermPtr new_body = substitute(body, var, replacement);
        return t->kind() == TermKind::Mu ? Term::mu(binder, new_body)
                                         : Term::nu(binder, new_body);
    }
    }
    throw InternalError("substitute: unreachable");
}

namespace {

bool alpha_eq_rec(const TermPtr& a, const TermPtr& b,
                  std::map<std::string, std::string>& a2b,
                  std::map<std::string, std::string>& b2a) {
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
    case TermKind::Var: {
        auto ia = a2b.find(a->name());
        auto ib = b2a.find(b->name());
        if (ia != a2b.end() || ib != b2a.end())
            return ia != a2b.end() && ib != b2a.end() &&
                   ia->second == b->name() && ib->second == a->name();
        return a->name() == b->name();
    }
    case TermKind::Prod:
    case TermKind::Coprod: {
        if (a->children().size() != b->children().size()) return false;
        for (std::size_t i = 0; i < a->children().size(); ++i)
            if (!alpha_eq_rec(a->children()[i], b->children()[i], a2b, b2a))
                return false;
        return true;
    }
    case TermKind::Mu:
    case TermKind::Nu: {
        auto save_a = a2b.count(a->name()) ? std::optional(a2b[a->name()]) : std::nullopt;
        auto save_b = b2a.count(b->name()) ? std::optional(b2a[b->name()]) : std::nullopt;
        a2b[a->name()] = b->name();
        b2a[b->name()] = a->name();
        bool ok = alpha_eq_rec(a->body(), b->body(), a2b, b2a);
        if (save_a) a2b[a->name()] = *save_a; else a2b.erase(a->name());
        if (save_b) b2a[b->name()] = *save_b; else b2a.erase(b->name());
        return ok;
    }
    }
    throw InternalError("alpha_eq: unreachable");
}

} // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
    std::map<std::string, std::string> a2b, b2a;
    return alpha_eq_rec(a, b, a2b, b2a);
}

namespace {

TermPtr canonicalize_rec(const TermPtr& t, std::map<std::string, std::string>& renaming,
                         std::set<std::string>& taken) {
    switch (t->kind()) {
    case TermKind::Var: {
        auto it = renaming.find(t->name());
        return it == renaming.end() ? t : Term::var(it->second);
    }
    case TermKind::Prod:
    case TermKind::Coprod: {
        std::vector<TermPtr> out;
        out.reserve(t->children().size());
        for (const auto& c : t->children())
            out.push_back(canonicalize_rec(c, renaming, taken));
        return t->kind() == TermKind::Prod ? Term::prod(std::move(out))
                                           : Term::coprod(std::move(out));
    }
    case TermKind::Mu:
    case TermKind::Nu: {
        std::string fresh = fresh_name(t->name(), taken);
        auto saved = renaming.count(t->name())
                         ? std::optional(renaming[t->name()]) : std::nullopt;
        renaming[t->name()] = fresh;
        TermPtr body = canonicalize_rec(t->body(), renaming, taken);
        if (saved) renaming[t->name()] = *saved; else renaming.erase(t->name());
        return t->kind() == TermKind::Mu ? Term::mu(fresh, body) : Term::nu(fresh, body);
    }
    }
    throw InternalError("canonicalize: unreachable");
}

} // namespace

TermPtr canonicalize(const TermPtr& t) {
    std::set<std::string> taken(t->free_names().begin(), t->free_names().end());
    std::map<std::string, std::string> renaming;
    return canonicalize_rec(t, renaming, taken);
}

TermPtr drop_vacuous_binders(const TermPtr& t) {
    switch (t->kind()) {
    case TermKind::Var:
        return t;
    case TermKind::Prod:
    case TermKind::Coprod: {
        std::vector<TermPtr> kids;
        kids.reserve(t->children().size());
        for (const auto& c : t->children()) kids.push_back(drop_vacuous_binders(c));
        return t->kind() == TermKind::Prod ? Term::prod(std::move(kids))
                                           : Term::coprod(std::move(kids));
    }
    case TermKind::Mu:
    case TermKind::Nu: {
        TermPtr body = drop_vacuous_binders(t->body());
        if (!body->mentions(t->name())) return body;
        return t->kind() == TermKind::Mu ? Term::mu(t->name(), body) : Term::nu(t->name(), body);
    }
    }
    throw InternalError("drop_vacuous_binders: unreachable");
}

namespace {

struct Token {
    enum class Kind { LParen, RParen, Symbol, End } kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_space();
        int line = line_, col = col_;
        if (pos_ >= text_.size()) return {Token::Kind::End, "", line, col};
        char c = text_[pos_];
        if (c == '(') { advance(); return {Token::Kind::LParen, "(", line, col}; }
        if (c == ')') { advance(); return {Token::Kind::RParen, ")", line, col}; }
        std::string sym;
        while (pos_ < text_.size()) {
            char d = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';')
                break;
            sym.push_back(d);
            advance();
        }
        return {Token::Kind::Symbol, sym, line, col};
    }

private:
    void advance() {
        if (text_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }
    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class TermParser {
public:
    TermParser(const std::string& text, std::vector<std::string>* warnings)
        : lexer_(text), warnings_(warnings) {
        lookahead_ = lexer_.next();
    }

    TermPtr parse_toplevel() {
        TermPtr t = parse_expr();
        if (lookahead_.kind != Token::Kind::End)
            throw ParseError("trailing input after term", lookahead_.line, lookahead_.column);
        return t;
    }

private:
    Token take() {
        Token t = lookahead_;
        lookahead_ = lexer_.next();
        return t;
    }

    void expect_open() {
        Token t = take();
        if (t.kind != Token::Kind::LParen)
            throw ParseError("expected '('", t.line, t.column);
    }

    std::string expect_name() {
        Token t = take();
        if (t.kind != Token::Kind::Symbol || !valid_name(t.text))
            throw ParseError("expected a variable name", t.line, t.column);
        return t.text;
    }

    void warn(const std::string& msg) {
        if (warnings_) warnings_->push_back(msg);
    }

    TermPtr parse_expr() {
        expect_open();
        Token head = take();
        if (head.kind != Token::Kind::Symbol)
            throw ParseError("expected one of var/prod/sum/mu/nu", head.line, head.column);
        if (head.text == "var") {
            std::string name = expect_name();
            close();
            return Term::var(name);
        }
        if (head.text == "prod" || head.text == "sum") {
            std::vector<TermPtr> children;
            while (lookahead_.kind == Token::Kind::LParen)
                children.push_back(parse_expr());
            close();
            return head.text == "prod" ? Term::prod(std::move(children))
                                       : Term::coprod(std::move(children));
        }
        if (head.text == "mu" || head.text == "nu") {
            std::string binder = expect_name();
            if (scope_.count(binder))
                warn("binder '" + binder + "' shadows an enclosing binder");
            else if (!all_binders_.insert(binder).second)
                warn("binder '" + binder + "' is reused");
            scope_.insert(binder);
            TermPtr body = parse_expr();
            scope_.erase(scope_.find(binder));
            close();
            return head.text == "mu" ? Term::mu(binder, body) : Term::nu(binder, body);
        }
        throw ParseError("unknown constructor '" + head.text + "'", head.line, head.column);
    }

    void close() {
        Token t = take();
        if (t.kind != Token::Kind::RParen)
            throw ParseError("expected ')'", t.line, t.column);
    }

    Lexer lexer_;
    Token lookahead_{Token::Kind::End, "", 0, 0};
    std::vector<std::string>* warnings_;
    std::multiset<std::string> scope_;
    std::set<std::string> all_binders_;
};

} // namespace

TermPtr parse_term(const std::string& text, std::vector<std::string>* warnings) {
    TermParser p(text, warnings);
    return canonicalize(p.parse_toplevel());
}

namespace {

void print_rec(const TermPtr& t, std::ostream& os) {
    switch (t->kind()) {
    case TermKind::Var:
        os << "(var " << t->name() << ")";
        return;
    case TermKind::Prod:
    case TermKind::Coprod:
        os << (t->kind() == TermKind::Prod ? "(prod" : "(sum");
        for (const auto& c : t->children()) {
            os << ' ';
            print_rec(c, os);
        }
        os << ')';
        return;
    case TermKind::Mu:
    case TermKind::Nu:
        os << (t->kind() == TermKind::Mu ? "(mu " : "(nu ") << t->name() << ' ';
        print_rec(t->body(), os);
        os << ')';
        return;
    }
}

} // namespace

std::string print_term(const TermPtr& t) {
    std::ostringstream os;
    print_rec(t, os);
    return os.str();
}

int compare_terms(const TermPtr& a, const TermPtr& b) {
    if (a == b) return 0;
    if (a->kind() != b->kind())
        return static_cast<int>(a->kind()) < static_cast<int>(b->kind()) ? -1 : 1;
    if (int c = a->name().compare(b->name()); c != 0) return c < 0 ? -1 : 1;
    const auto& ca = a->children();
    const auto& cb = b->children();
    if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (int c = compare_terms(ca[i], cb[i]); c != 0) return c;
    return 0;
}

} // namespace mugame
