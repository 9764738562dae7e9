#pragma once

#include "mugame/graph.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace mugame {

enum class Player : std::uint8_t { Eva, Adam };

Player opponent(Player p);

// Max-parity game: an infinite play is won by Eva iff the highest priority
// seen infinitely often is even; a finite maximal play is lost by the owner
// of its final vertex. Var-labeled vertices are open leaves standing for
// free variables.
struct ParityGame {
    Graph arena;
    std::map<VertexId, Player> owner;
    std::map<VertexId, unsigned> priority;
    VertexId initial{0};
    std::map<VertexId, std::string> var_label;
    // Declared ceiling; every vertex priority must stay at or below it.
    unsigned priority_bound = 0;
};

// Throws ValidationError listing every violated invariant.
void validate_game(const ParityGame& g);

unsigned max_priority(const ParityGame& g);

// Keeps only `keep` vertices and the edges between them. If the initial
// vertex is dropped, the smallest surviving id takes its place.
ParityGame restrict_game(const ParityGame& g, const std::set<VertexId>& keep);

// Least set from which `p` can force reaching `target` in finitely many
// steps. A vertex of the opponent needs at least one move for the
// all-successors rule to fire, so dead ends are never attracted.
std::set<VertexId> attractor(const ParityGame& g, Player p, const std::set<VertexId>& target);

enum class LeafAssumption : std::uint8_t { Win, Lose };

struct WinningRegions {
    std::set<VertexId> eva_region;
    std::set<VertexId> adam_region;
    // Positional strategies, defined exactly on the movable vertices each
    // player owns inside their own region.
    std::map<VertexId, EdgeId> eva_strategy;
    std::map<VertexId, EdgeId> adam_strategy;
};

// Recursive attractor decomposition. `assumption` settles every var-labeled
// leaf as an outright win or loss for Eva; it must cover all labels. The
// returned strategies are re-verified by a cycle-parity check on every call.
WinningRegions zielonka_solve(const ParityGame& g,
                              const std::map<std::string, LeafAssumption>& assumption = {});

// PGSolver-style text format:
//   parity MAXID;
//   start ID;                    (only when the initial vertex is not the
//                                 smallest id)
//   ID PRIORITY OWNER SUCC,...;  (owner 0 = Eva, 1 = Adam)
//   ID PRIORITY OWNER;           (dead end)
//   ID PRIORITY OWNER "var:X";   (labeled leaf)
// Vertices print in ascending id order, successors in edge order; parsing
// then printing a canonical file reproduces it byte for byte.
ParityGame parse_game(const std::string& text);
std::string print_game(const ParityGame& g);

} // namespace mugame
