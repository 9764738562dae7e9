#pragma once

#include "mugame/game.hpp"
#include "mugame/oracle.hpp"
#include "mugame/semantics.hpp"
#include "mugame/term.hpp"

#include <json.hpp>

namespace mugame {

// Reports use ordered_json everywhere so the byte output is a pure
// function of the input.
using Json = nlohmann::ordered_json;

// Nested tagged arrays: ["atom", set, i], ["star"], ["tuple", ...],
// ["inj", tag, v], ["fold", v], ["nu", stage].
Json elem_to_json(const ElemPtr& e);

// verdict/cardinality/elements for finite values (elements only up to
// `element_cap`), verdict/certificate for infinite ones.
Json set_value_to_json(const SetValue& v, std::size_t element_cap = 1000);

Json regions_to_json(const ParityGame& g, const WinningRegions& w);

Json stabilized_to_json(const StabilizedCount& s);

Json game_summary(const ParityGame& g);

Json term_summary(const TermPtr& t);

} // namespace mugame
