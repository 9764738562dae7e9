#include "mugame/equation.hpp"

#include "mugame/error.hpp"

#include <set>
#include <sstream>

namespace mugame {

void validate_system(const EquationSystem& s) {
    std::set<std::string> lhs;
    for (const auto& eq : s.equations) {
        if (!lhs.insert(eq.lhs).second)
            throw ValidationError("duplicate equation variable '" + eq.lhs + "'");
        bool odd = eq.priority % 2 == 1;
        if ((eq.kind == BinderKind::Mu) != odd)
            throw ValidationError("equation '" + eq.lhs +
                                  "': priority parity does not match binder kind");
        if (!eq.rhs) throw ValidationError("equation '" + eq.lhs + "' has no right-hand side");
    }
    std::set<std::string> params;
    for (const auto& p : s.parameters) {
        if (!params.insert(p).second)
            throw ValidationError("duplicate parameter '" + p + "'");
        if (lhs.count(p))
            throw ValidationError("parameter '" + p + "' collides with an equation variable");
    }
    for (const auto& eq : s.equations)
        for (const auto& v : free_vars(eq.rhs))
            if (!lhs.count(v) && !params.count(v))
                throw ValidationError("equation '" + eq.lhs + "' mentions unknown variable '" +
                                      v + "'");
}

EquationSystem parse_equation_system(const std::string& text) {
    EquationSystem s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        std::string trimmed = line.substr(first);
        while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t' ||
                                    trimmed.back() == '\r'))
            trimmed.pop_back();
        if (trimmed.rfind("param ", 0) == 0) {
            if (trimmed.back() != ';')
                throw ParseError("parameter line must end with ';'", lineno, 1);
            std::string name = trimmed.substr(6, trimmed.size() - 7);
            while (!name.empty() && name.back() == ' ') name.pop_back();
            s.parameters.push_back(name);
            continue;
        }
        std::size_t eq = trimmed.find(" =");
        if (eq == std::string::npos)
            throw ParseError("expected 'NAME =mu[P] TERM' or 'NAME =nu[P] TERM'", lineno, 1);
        std::string lhs = trimmed.substr(0, eq);
        std::size_t rest = eq + 2;
        BinderKind kind;
        if (trimmed.compare(rest, 3, "mu[") == 0) {
            kind = BinderKind::Mu;
            rest += 3;
        } else if (trimmed.compare(rest, 3, "nu[") == 0) {
            kind = BinderKind::Nu;
            rest += 3;
        } else {
            throw ParseError("expected '=mu[' or '=nu[' after variable name", lineno,
                             static_cast<int>(eq + 2));
        }
        std::size_t close = trimmed.find(']', rest);
        if (close == std::string::npos)
            throw ParseError("unterminated priority bracket", lineno, static_cast<int>(rest));
        unsigned priority = 0;
        try {
            priority = static_cast<unsigned>(std::stoul(trimmed.substr(rest, close - rest)));
        } catch (const std::exception&) {
            throw ParseError("priority must be a nonnegative integer", lineno,
                             static_cast<int>(rest));
        }
        std::string term_text = trimmed.substr(close + 1);
        TermPtr rhs;
        try {
            rhs = parse_term(term_text);
        } catch (const ParseError& e) {
            throw ParseError(std::string("in equation '") + lhs + "': " + e.what(), lineno, 1);
        }
        s.equations.push_back(Equation{lhs, kind, priority, rhs});
    }
    validate_system(s);
    return s;
}

std::string print_equation_system(const EquationSystem& s) {
    std::ostringstream os;
    for (const auto& p : s.parameters) os << "param " << p << ";\n";
    for (const auto& eq : s.equations) {
        os << eq.lhs << " =" << (eq.kind == BinderKind::Mu ? "mu" : "nu") << '['
           << eq.priority << "] " << print_term(eq.rhs) << '\n';
    }
    return os.str();
}

} // namespace mugame
