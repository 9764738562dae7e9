#pragma once

#include "mugame/equation.hpp"
#include "mugame/game.hpp"
#include "mugame/term.hpp"

namespace mugame {

// One equation per unlabeled vertex, ascending by id. An Eva vertex becomes
// a sum over its successors and an Adam vertex a product, components in
// move order; each component is X<id> for an unlabeled target and the
// leaf's own name for a labeled one. The equation keeps the vertex
// priority, with kind nu when it is even and mu when it is odd. Dead ends
// pin the intended winner instead: an Adam dead end becomes X<id> =nu[0] 1
// and an Eva dead end X<id> =mu[1] 0. Leaf labels become the parameters.
EquationSystem game_to_system(const ParityGame& g);

// gaussian_eliminate(game_to_system(g)) projected at the initial vertex.
// Keeps whatever vacuous binders elimination produces.
TermPtr game_to_term(const ParityGame& g);

// One vertex per subterm occurrence. Products are Adam vertices and sums
// Eva vertices, one move per component in order. A binder over a product
// or sum fuses with its body vertex; over a variable or another binder it
// becomes an Eva pass-through vertex with a single move. Each bound
// occurrence is a back edge to its binder's vertex and each free
// occurrence its own labeled leaf. Binder priorities grow strictly
// outward, odd for mu and even for nu; all other vertices get priority 0,
// so the top priority of any cycle is the outermost binder on it.
ParityGame term_to_game(const TermPtr& t);

} // namespace mugame
