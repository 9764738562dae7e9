#include "mugame/game.hpp"

#include "mugame/error.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mugame {

Player opponent(Player p) { return p == Player::Eva ? Player::Adam : Player::Eva; }

namespace {

bool valid_leaf_name(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::string vid(VertexId v) { return std::to_string(v.value); }

} // namespace

void validate_game(const ParityGame& g) {
    std::vector<std::string> problems;
    auto ids = g.arena.vertices();
    if (ids.empty()) {
        problems.push_back("no initial position");
    } else if (!g.arena.has_vertex(g.initial)) {
        problems.push_back("initial vertex " + vid(g.initial) + " is not in the arena");
    }
    for (VertexId v : ids) {
        if (!g.owner.count(v)) problems.push_back("vertex " + vid(v) + " has no owner");
        auto pit = g.priority.find(v);
        if (pit == g.priority.end()) {
            problems.push_back("vertex " + vid(v) + " has no priority");
        } else if (pit->second > g.priority_bound) {
            problems.push_back("vertex " + vid(v) + " has priority " +
                               std::to_string(pit->second) + " above the bound " +
                               std::to_string(g.priority_bound));
        }
    }
    for (const auto& [v, _] : g.owner)
        if (!g.arena.has_vertex(v)) problems.push_back("owner entry for unknown vertex " + vid(v));
    for (const auto& [v, _] : g.priority)
        if (!g.arena.has_vertex(v)) problems.push_back("priority entry for unknown vertex " + vid(v));
    for (const auto& [v, name] : g.var_label) {
        if (!g.arena.has_vertex(v)) {
            problems.push_back("label on unknown vertex " + vid(v));
            continue;
        }
        if (!g.arena.out_edges(v).empty())
            problems.push_back("labeled vertex " + vid(v) + " has outgoing moves");
        if (!valid_leaf_name(name))
            problems.push_back("vertex " + vid(v) + " has a malformed label '" + name + "'");
    }
    if (!problems.empty()) {
        std::string msg = problems.front();
        for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
        throw ValidationError(msg);
    }
}

unsigned max_priority(const ParityGame& g) {
    unsigned m = 0;
    for (VertexId v : g.arena.vertices()) m = std::max(m, g.priority.at(v));
    return m;
}

ParityGame restrict_game(const ParityGame& g, const std::set<VertexId>& keep) {
    ParityGame out;
    out.priority_bound = g.priority_bound;
    for (VertexId v : g.arena.vertices()) {
        if (!keep.count(v)) continue;
        out.arena.add_vertex(v);
        out.owner[v] = g.owner.at(v);
        out.priority[v] = g.priority.at(v);
        if (auto it = g.var_label.find(v); it != g.var_label.end()) out.var_label[v] = it->second;
    }
    for (VertexId v : g.arena.vertices()) {
        if (!keep.count(v)) continue;
        for (EdgeId e : g.arena.out_edges(v))
            if (keep.count(g.arena.tgt(e))) out.arena.add_edge(e, v, g.arena.tgt(e));
    }
    if (keep.count(g.initial)) {
        out.initial = g.initial;
    } else if (out.arena.vertex_count() > 0) {
        out.initial = out.arena.vertices().front();
    }
    return out;
}

std::set<VertexId> attractor(const ParityGame& g, Player p, const std::set<VertexId>& target) {
    for (VertexId v : target)
        if (!g.arena.has_vertex(v)) throw ValidationError("attractor target outside the arena");
    std::map<VertexId, std::vector<VertexId>> preds;
    std::map<VertexId, std::size_t> remaining;
    for (VertexId v : g.arena.vertices()) {
        remaining[v] = g.arena.out_edges(v).size();
        for (EdgeId e : g.arena.out_edges(v)) preds[g.arena.tgt(e)].push_back(v);
    }
    std::set<VertexId> out = target;
    std::deque<VertexId> work(target.begin(), target.end());
    while (!work.empty()) {
        VertexId u = work.front();
        work.pop_front();
        auto pit = preds.find(u);
        if (pit == preds.end()) continue;
        for (VertexId v : pit->second) {
            if (out.count(v)) {
                // an edge into the attractor still uses up a move of the
                // opponent's budget below; nothing to do for members
                continue;
            }
            if (g.owner.at(v) == p) {
                out.insert(v);
                work.push_back(v);
            } else if (--remaining[v] == 0) {
                out.insert(v);
                work.push_back(v);
            }
        }
    }
    return out;
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Dense mirror of a game with every dead end and labeled leaf replaced by a
// self-loop whose priority encodes the intended winner, making the arena
// total so the recursion needs no dead-end cases.
struct SolverGame {
    std::size_t n = 0;
    std::vector<Player> owner;
    std::vector<unsigned> prio;
    std::vector<std::vector<std::size_t>> succ;
    std::vector<std::vector<EdgeId>> edge;
    std::vector<char> synthetic;
    std::vector<VertexId> ids;
};

using Bits = std::vector<char>;

bool any_bit(const Bits& b) {
    for (char c : b)
        if (c) return true;
    return false;
}

struct SccFinder {
    const std::vector<std::vector<std::size_t>>& adj;
    const Bits& active;
    std::vector<int> index;
    std::vector<int> low;
    std::vector<char> onstack;
    std::vector<std::size_t> stack;
    int counter = 0;
    std::vector<std::vector<std::size_t>> sccs;

    SccFinder(const std::vector<std::vector<std::size_t>>& a, const Bits& act)
        : adj(a), active(act), index(a.size(), -1), low(a.size(), -1), onstack(a.size(), 0) {}

    void dfs(std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        onstack[v] = 1;
        for (std::size_t w : adj[v]) {
            if (!active[w]) continue;
            if (index[w] < 0) {
                dfs(w);
                low[v] = std::min(low[v], low[w]);
            } else if (onstack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> scc;
            for (;;) {
                std::size_t w = stack.back();
                stack.pop_back();
                onstack[w] = 0;
                scc.push_back(w);
                if (w == v) break;
            }
            sccs.push_back(std::move(scc));
        }
    }

    void run() {
        for (std::size_t v = 0; v < adj.size(); ++v)
            if (active[v] && index[v] < 0) dfs(v);
    }
};

// Fails unless every cycle of the restricted graph has a top priority of
// `p`'s parity. Works by SCC refinement: the top priority of a nontrivial
// SCC is realized by some cycle, so it must be friendly; cycles avoiding
// the top vertices live in the SCC minus those vertices.
void check_cycles(const SolverGame& sg, const std::vector<std::vector<std::size_t>>& adj,
                  const Bits& active, Player p) {
    if (!any_bit(active)) return;
    SccFinder finder(adj, active);
    finder.run();
    for (const auto& scc : finder.sccs) {
        bool nontrivial = scc.size() >= 2;
        if (!nontrivial) {
            std::size_t v = scc.front();
            for (std::size_t w : adj[v])
                if (w == v) nontrivial = true;
        }
        if (!nontrivial) continue;
        unsigned m = 0;
        for (std::size_t v : scc) m = std::max(m, sg.prio[v]);
        bool friendly = (m % 2 == 0) == (p == Player::Eva);
        if (!friendly)
            throw InternalError("solver self-check: a strategy-consistent cycle tops out at "
                                "hostile priority " +
                                std::to_string(m));
        Bits inner(sg.n, 0);
        bool nonempty = false;
        for (std::size_t v : scc)
            if (sg.prio[v] < m) {
                inner[v] = 1;
                nonempty = true;
            }
        if (nonempty) check_cycles(sg, adj, inner, p);
    }
}

void check_region(const SolverGame& sg, const Bits& region, Player p,
                  const std::vector<std::size_t>& strat) {
    std::vector<std::vector<std::size_t>> adj(sg.n);
    for (std::size_t i = 0; i < sg.n; ++i) {
        if (!region[i]) continue;
        if (sg.owner[i] == p) {
            std::size_t k = strat[i];
            if (k == kNone || k >= sg.succ[i].size())
                throw InternalError("solver self-check: vertex " + vid(sg.ids[i]) +
                                    " has no strategy move");
            std::size_t t = sg.succ[i][k];
            if (!region[t])
                throw InternalError("solver self-check: strategy leaves the region at vertex " +
                                    vid(sg.ids[i]));
            adj[i].push_back(t);
        } else {
            for (std::size_t t : sg.succ[i]) {
                if (!region[t])
                    throw InternalError("solver self-check: region not closed at vertex " +
                                        vid(sg.ids[i]));
                adj[i].push_back(t);
            }
        }
    }
    check_cycles(sg, adj, region, p);
}

struct ZlkSolver {
    const SolverGame& sg;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> preds;
    std::vector<std::size_t> strat;

    explicit ZlkSolver(const SolverGame& s) : sg(s), strat(s.n, kNone) {
        preds.resize(sg.n);
        for (std::size_t i = 0; i < sg.n; ++i)
            for (std::size_t k = 0; k < sg.succ[i].size(); ++k)
                preds[sg.succ[i][k]].push_back({i, k});
    }

    Bits attract(const Bits& alive, Player who, const Bits& target) {
        Bits out = target;
        std::vector<std::size_t> remaining(sg.n, 0);
        std::deque<std::size_t> work;
        for (std::size_t i = 0; i < sg.n; ++i) {
            if (!alive[i]) continue;
            if (target[i]) {
                work.push_back(i);
                continue;
            }
            for (std::size_t t : sg.succ[i])
                if (alive[t]) ++remaining[i];
        }
        while (!work.empty()) {
            std::size_t u = work.front();
            work.pop_front();
            for (const auto& [v, pos] : preds[u]) {
                if (!alive[v] || out[v]) continue;
                if (sg.owner[v] == who) {
                    out[v] = 1;
                    strat[v] = pos;
                    work.push_back(v);
                } else if (--remaining[v] == 0) {
                    out[v] = 1;
                    work.push_back(v);
                }
            }
        }
        return out;
    }

    std::pair<Bits, Bits> solve(const Bits& alive) {
        if (!any_bit(alive)) return {Bits(sg.n, 0), Bits(sg.n, 0)};
        unsigned p = 0;
        for (std::size_t i = 0; i < sg.n; ++i)
            if (alive[i]) p = std::max(p, sg.prio[i]);
        Player s = (p % 2 == 0) ? Player::Eva : Player::Adam;
        Bits target(sg.n, 0);
        for (std::size_t i = 0; i < sg.n; ++i)
            if (alive[i] && sg.prio[i] == p) target[i] = 1;
        Bits a = attract(alive, s, target);
        Bits rest(sg.n, 0);
        for (std::size_t i = 0; i < sg.n; ++i) rest[i] = alive[i] && !a[i];
        auto [we, wa] = solve(rest);
        const Bits& wopp = (s == Player::Eva) ? wa : we;
        if (!any_bit(wopp)) {
            // the opponent holds nothing below, so s sweeps the subgame;
            // top-priority vertices of s may move anywhere that is alive
            for (std::size_t i = 0; i < sg.n; ++i) {
                if (!target[i] || sg.owner[i] != s) continue;
                std::size_t pick = kNone;
                for (std::size_t k = 0; k < sg.succ[i].size(); ++k)
                    if (alive[sg.succ[i][k]]) {
                        pick = k;
                        break;
                    }
                if (pick == kNone)
                    throw InternalError("solver: alive vertex without an alive move");
                strat[i] = pick;
            }
            if (s == Player::Eva) return {alive, Bits(sg.n, 0)};
            return {Bits(sg.n, 0), alive};
        }
        Bits b = attract(alive, opponent(s), wopp);
        Bits rest2(sg.n, 0);
        for (std::size_t i = 0; i < sg.n; ++i) rest2[i] = alive[i] && !b[i];
        auto [we2, wa2] = solve(rest2);
        if (s == Player::Eva) {
            for (std::size_t i = 0; i < sg.n; ++i) wa2[i] = wa2[i] || b[i];
            return {we2, wa2};
        }
        for (std::size_t i = 0; i < sg.n; ++i) we2[i] = we2[i] || b[i];
        return {we2, wa2};
    }
};

} // namespace

WinningRegions zielonka_solve(const ParityGame& g,
                              const std::map<std::string, LeafAssumption>& assumption) {
    validate_game(g);
    for (const auto& [v, name] : g.var_label)
        if (!assumption.count(name))
            throw ValidationError("zielonka_solve: no assumption for leaf variable " + name);
    SolverGame sg;
    sg.ids = g.arena.vertices();
    sg.n = sg.ids.size();
    sg.owner.resize(sg.n);
    sg.prio.resize(sg.n);
    sg.succ.resize(sg.n);
    sg.edge.resize(sg.n);
    sg.synthetic.assign(sg.n, 0);
    std::map<VertexId, std::size_t> at;
    for (std::size_t i = 0; i < sg.n; ++i) at[sg.ids[i]] = i;
    for (std::size_t i = 0; i < sg.n; ++i) {
        VertexId v = sg.ids[i];
        sg.owner[i] = g.owner.at(v);
        const auto& outs = g.arena.out_edges(v);
        auto lab = g.var_label.find(v);
        if (lab != g.var_label.end()) {
            // assumed leaves loop forever at a priority that decides them
            bool win = assumption.at(lab->second) == LeafAssumption::Win;
            sg.prio[i] = win ? 0 : 1;
            sg.succ[i] = {i};
            sg.edge[i] = {EdgeId{0}};
            sg.synthetic[i] = 1;
        } else if (outs.empty()) {
            // a dead end loses for its owner, encoded the same way
            sg.prio[i] = (sg.owner[i] == Player::Eva) ? 1u : 0u;
            sg.succ[i] = {i};
            sg.edge[i] = {EdgeId{0}};
            sg.synthetic[i] = 1;
        } else {
            sg.prio[i] = g.priority.at(v);
            for (EdgeId e : outs) {
                sg.succ[i].push_back(at.at(g.arena.tgt(e)));
                sg.edge[i].push_back(e);
            }
        }
    }
    ZlkSolver solver(sg);
    auto [we, wa] = solver.solve(Bits(sg.n, 1));
    for (std::size_t i = 0; i < sg.n; ++i)
        if (we[i] == wa[i]) throw InternalError("solver self-check: regions do not partition");
    check_region(sg, we, Player::Eva, solver.strat);
    check_region(sg, wa, Player::Adam, solver.strat);
    WinningRegions out;
    for (std::size_t i = 0; i < sg.n; ++i) {
        VertexId v = sg.ids[i];
        if (g.var_label.count(v)) continue;
        bool eva = we[i];
        (eva ? out.eva_region : out.adam_region).insert(v);
        if (sg.synthetic[i]) continue;
        if (eva && sg.owner[i] == Player::Eva)
            out.eva_strategy[v] = sg.edge[i][solver.strat[i]];
        else if (!eva && sg.owner[i] == Player::Adam)
            out.adam_strategy[v] = sg.edge[i][solver.strat[i]];
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> tokenize_pg(const std::string& line, std::size_t lineno) {
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '"') {
            std::size_t j = line.find('"', i + 1);
            if (j == std::string::npos) throw ParseError("unterminated quote", lineno, i + 1);
            toks.push_back(line.substr(i, j - i + 1));
            i = j + 1;
        } else {
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
                   line[j] != '"')
                ++j;
            toks.push_back(line.substr(i, j - i));
            i = j;
        }
    }
    return toks;
}

unsigned long parse_number(const std::string& tok, std::size_t lineno, const char* what) {
    if (tok.empty()) throw ParseError(std::string("empty ") + what, lineno, 1);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError(std::string("malformed ") + what + " '" + tok + "'", lineno, 1);
    return std::stoul(tok);
}

} // namespace

ParityGame parse_game(const std::string& text) {
    ParityGame g;
    struct Pending {
        std::size_t lineno;
        VertexId src;
        std::vector<VertexId> succs;
    };
    std::vector<Pending> pending;
    std::optional<unsigned long> declared_max;
    bool saw_start = false;
    VertexId start{};
    bool any_vertex = false;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.back() != ';')
            throw ParseError("statement does not end with ';'", lineno, line.size());
        line = trim(line.substr(0, line.size() - 1));
        auto toks = tokenize_pg(line, lineno);
        if (toks.empty()) throw ParseError("empty statement", lineno, 1);
        if (toks[0] == "parity") {
            if (toks.size() != 2) throw ParseError("malformed parity header", lineno, 1);
            if (declared_max || any_vertex || saw_start)
                throw ParseError("parity header out of place", lineno, 1);
            declared_max = parse_number(toks[1], lineno, "max vertex id");
            continue;
        }
        if (toks[0] == "start") {
            if (toks.size() != 2) throw ParseError("malformed start line", lineno, 1);
            if (saw_start || any_vertex) throw ParseError("start line out of place", lineno, 1);
            start = VertexId{static_cast<std::uint32_t>(parse_number(toks[1], lineno, "start id"))};
            saw_start = true;
            continue;
        }
        if (toks.size() < 3 || toks.size() > 5)
            throw ParseError("vertex line needs id, priority, owner and at most "
                             "successors and a label",
                             lineno, 1);
        VertexId id{static_cast<std::uint32_t>(parse_number(toks[0], lineno, "vertex id"))};
        unsigned prio = static_cast<unsigned>(parse_number(toks[1], lineno, "priority"));
        if (toks[2] != "0" && toks[2] != "1")
            throw ParseError("owner must be 0 (Eva) or 1 (Adam)", lineno, 1);
        Player who = toks[2] == "0" ? Player::Eva : Player::Adam;
        std::size_t k = 3;
        std::vector<VertexId> succs;
        std::string label;
        bool has_label = false;
        if (k < toks.size() && toks[k].front() != '"') {
            std::string list = toks[k];
            std::size_t pos = 0;
            while (pos <= list.size()) {
                std::size_t comma = list.find(',', pos);
                std::string piece =
                    comma == std::string::npos ? list.substr(pos) : list.substr(pos, comma - pos);
                succs.push_back(VertexId{
                    static_cast<std::uint32_t>(parse_number(piece, lineno, "successor id"))});
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            ++k;
        }
        if (k < toks.size() && toks[k].front() == '"') {
            std::string quoted = toks[k].substr(1, toks[k].size() - 2);
            if (quoted.rfind("var:", 0) != 0)
                throw ParseError("vertex name must have the form \"var:NAME\"", lineno, 1);
            label = quoted.substr(4);
            if (!valid_leaf_name(label))
                throw ParseError("malformed variable name '" + label + "'", lineno, 1);
            has_label = true;
            ++k;
        }
        if (k != toks.size()) throw ParseError("unexpected trailing tokens", lineno, 1);
        if (has_label && !succs.empty())
            throw ParseError("labeled vertex must be a leaf", lineno, 1);
        if (g.arena.has_vertex(id))
            throw ParseError("duplicate vertex id " + vid(id), lineno, 1);
        g.arena.add_vertex(id);
        g.owner[id] = who;
        g.priority[id] = prio;
        if (has_label) g.var_label[id] = label;
        pending.push_back({lineno, id, std::move(succs)});
        any_vertex = true;
    }
    if (!any_vertex) throw ParseError("game file declares no vertices", lineno ? lineno : 1, 1);
    for (const auto& batch : pending)
        for (VertexId s : batch.succs) {
            if (!g.arena.has_vertex(s))
                throw ParseError("successor " + vid(s) + " refers to an unknown vertex",
                                 batch.lineno, 1);
            g.arena.add_edge(batch.src, s);
        }
    auto ids = g.arena.vertices();
    if (declared_max && *declared_max < ids.back().value)
        throw ParseError("parity header below the largest vertex id", 1, 1);
    if (saw_start) {
        if (!g.arena.has_vertex(start))
            throw ParseError("start vertex " + vid(start) + " does not exist", 1, 1);
        g.initial = start;
    } else {
        g.initial = ids.front();
    }
    g.priority_bound = max_priority(g);
    return g;
}

std::string print_game(const ParityGame& g) {
    auto ids = g.arena.vertices();
    if (ids.empty()) throw ValidationError("cannot print an empty game");
    std::ostringstream out;
    out << "parity " << ids.back().value << ";\n";
    if (!(g.initial == ids.front())) out << "start " << g.initial.value << ";\n";
    for (VertexId v : ids) {
        auto oit = g.owner.find(v);
        auto pit = g.priority.find(v);
        if (oit == g.owner.end() || pit == g.priority.end())
            throw ValidationError("cannot print vertex " + vid(v) + " without owner and priority");
        out << v.value << " " << pit->second << " " << (oit->second == Player::Eva ? 0 : 1);
        const auto& outs = g.arena.out_edges(v);
        if (!outs.empty()) {
            out << " ";
            for (std::size_t k = 0; k < outs.size(); ++k) {
                if (k) out << ",";
                out << g.arena.tgt(outs[k]).value;
            }
        }
        if (auto it = g.var_label.find(v); it != g.var_label.end())
            out << " \"var:" << it->second << "\"";
        out << ";\n";
    }
    return out.str();
}

} // namespace mugame
