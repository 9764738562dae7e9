#include "mugame/generate.hpp"
#include "mugame/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <string>

using namespace mugame;

namespace {

// Adam-heavy game: prefix counts stay 0/1 so depth can grow without
// tripping the counting cap, leaving pure traversal work to measure.
ParityGame bench_game(std::uint64_t seed, unsigned vertices, unsigned degree) {
    Rng rng(seed);
    ParityGame g;
    std::vector<VertexId> ids;
    for (unsigned i = 0; i < vertices; ++i) ids.push_back(g.arena.add_vertex());
    for (unsigned i = 0; i < vertices; ++i) {
        g.owner[ids[i]] = Player::Adam;
        g.priority[ids[i]] = 2 * static_cast<unsigned>(rng.below(3));
        for (unsigned d = 0; d < degree; ++d)
            g.arena.add_edge(ids[i], ids[rng.below(vertices)]);
    }
    g.initial = ids[0];
    g.priority_bound = max_priority(g);
    return g;
}

template <typename F> double time_ms(F&& f, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    unsigned vertices = argc > 1 ? static_cast<unsigned>(std::stoul(argv[1])) : 4000;
    unsigned depth = argc > 2 ? static_cast<unsigned>(std::stoul(argv[2])) : 256;
    int reps = argc > 3 ? std::stoi(argv[3]) : 3;
    ParityGame g = bench_game(7, vertices, 3);

    std::uint64_t sink = 0;
    double parallel = time_ms([&] { sink += count_prefixes(g, depth); }, reps);
    double serial = time_ms([&] { sink += count_prefixes_serial(g, depth); }, reps);

    std::printf("vertices %u, depth %u, reps %d\n", vertices, depth, reps);
    std::printf("  layered (parallel when built with OpenMP): %8.2f ms\n", parallel);
    std::printf("  recursive serial reference:                %8.2f ms\n", serial);
    std::printf("  speedup: %.2fx\n", serial / parallel);
    return sink == static_cast<std::uint64_t>(-1) ? 1 : 0;
}
