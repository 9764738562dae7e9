#pragma once

#include "mugame/term.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace mugame::detail {

// Abstract cardinality lattice: Zero < One < Many < Inf.
// Many stands for any finite size >= 2.
enum class AbsSize : std::uint8_t { Zero, One, Many, Inf };

AbsSize abs_of_count(std::size_t n);

// Abstract size with an infinity certificate when the result is Inf.
struct AbsResult {
    AbsSize size;
    std::string cert;
};

using AbsEnv = std::map<std::string, AbsSize>;

AbsResult abs_size(const TermPtr& t, const AbsEnv& env);

// Exact emptiness test (boolean least/greatest fixed points); cheap,
// used to prune dead subterms before evaluation.
bool abs_inhabited(const TermPtr& t, const AbsEnv& env);

} // namespace mugame::detail
