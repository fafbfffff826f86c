#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ergphase/enumeration.hpp"
#include "ergphase/errors.hpp"
#include "ergphase/model.hpp"
#include "ergphase/subgraph.hpp"
#include "ergphase/textio.hpp"

namespace ergphase {

// splitmix64: 64-bit state advanced by the golden-ratio increment, output
// mixed by two xor-multiply rounds.  Chosen for its fixed published constants
// so traces replay byte for byte on any implementation of this interface.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1): the top 53 bits scaled down.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) by multiply-shift reduction.  The bias of
    // order bound/2^64 is negligible at the bounds used here, and the mapping
    // is fixed, which is what reproducibility needs.
    std::uint64_t below(std::uint64_t bound) {
        return std::uint64_t((unsigned __int128)(next()) * bound >> 64);
    }
};

inline constexpr const char* rng_identifier = "splitmix64";

namespace detail {

// Count of vertex maps from h into g+ij that place at least one h-edge onto
// the pair {i, j}.  This equals hom(g with ij) - hom(g without ij): exactly
// the maps using the toggled edge.  Each such map is counted at its smallest
// h-edge index landing on {i, j}: the anchor edge k is pinned there in both
// orientations, and while filling in the rest, any smaller-indexed h-edge is
// forbidden from mapping onto the pair.
inline std::int64_t hom_delta_count(const SubgraphSpec& h, const GraphState& g, int i,
                                    int j) {
    const int k_verts = h.n_vertices;
    const int n = g.n;

    std::array<std::uint64_t, 64> adj{};
    for (int v = 0; v < n; ++v) adj[v] = g.rows[v];
    adj[i] |= std::uint64_t{1} << j;
    adj[j] |= std::uint64_t{1} << i;
    const std::uint64_t all_mask =
        (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    const int n_edges = int(h.edges.size());

    std::int64_t total = 0;
    std::array<int, 64> image{};
    std::array<bool, 64> assigned{};

    for (int k = 0; k < n_edges; ++k) {
        const auto [ea, eb] = h.edges[k];
        for (int orient = 0; orient < 2; ++orient) {
            const int va = orient ? eb : ea;
            const int vb = orient ? ea : eb;
            image[va] = i;
            image[vb] = j;
            assigned.fill(false);
            assigned[va] = assigned[vb] = true;

            // Assign the remaining h-vertices most-constrained first so the
            // candidate masks prune early.
            std::array<int, 64> order{};
            int n_free = 0;
            {
                std::array<bool, 64> placed = assigned;
                for (int step = 0; step < k_verts - 2; ++step) {
                    int best = -1, best_links = -1;
                    for (int v = 0; v < k_verts; ++v) {
                        if (placed[v]) continue;
                        int links = 0;
                        for (const auto& [x, y] : h.edges)
                            if ((x == v && placed[y]) || (y == v && placed[x])) ++links;
                        if (links > best_links) {
                            best_links = links;
                            best = v;
                        }
                    }
                    placed[best] = true;
                    order[n_free++] = best;
                }
            }

            // rec(level): extend the map over order[level..).
            const auto rec = [&](const auto& self, int level) -> std::int64_t {
                if (level == n_free) return 1;
                const int v = order[level];
                std::uint64_t candidates = all_mask;
                for (int m = 0; m < n_edges; ++m) {
                    const auto& [x, y] = h.edges[m];
                    int w = -1;
                    if (x == v && assigned[y])
                        w = y;
                    else if (y == v && assigned[x])
                        w = x;
                    else
                        continue;
                    candidates &= adj[image[w]];
                    if (m < k) {
                        // Minimality: a smaller-indexed edge must not land on {i, j}.
                        if (image[w] == i) candidates &= ~(std::uint64_t{1} << j);
                        if (image[w] == j) candidates &= ~(std::uint64_t{1} << i);
                    }
                }
                if (level == n_free - 1) return std::popcount(candidates);
                std::int64_t sum = 0;
                assigned[v] = true;
                while (candidates) {
                    image[v] = std::countr_zero(candidates);
                    candidates &= candidates - 1;
                    sum += self(self, level + 1);
                }
                assigned[v] = false;
                return sum;
            };

            if (n_free == 0)
                total += 1;
            else
                total += rec(rec, 0);
        }
    }
    return total;
}

} // namespace detail

// Change in the homomorphism count of h when the edge {i, j} is added to g
// (equivalently removed: the count difference is symmetric).  Agrees with
// two full counts but touches only the maps through the toggled pair.
inline double hom_delta(const SubgraphSpec& h, const GraphState& g, int i, int j) {
    validate_subgraph(h);
    if (i == j) throw DomainError("hom_delta needs two distinct vertices");
    if (i < 0 || j < 0 || i >= g.n || j >= g.n)
        throw DomainError("hom_delta vertex out of range");
    detail::check_hom_budget(h, g.n);
    return double(detail::hom_delta_count(h, g, i, j));
}

struct ChainConfig {
    int n = 0;
    BetaPoint beta;
    SubgraphSpec h2 = triangle();
    SubgraphSpec h3 = cycle(5);
    std::int64_t sweeps = 0;
    std::int64_t burn_in = 0;
    std::int64_t thin = 1;
    std::uint64_t seed = 0;
};

inline void validate_chain_config(const ChainConfig& cfg) {
    if (cfg.n < 2 || cfg.n > 64) throw DomainError("chain needs 2 <= n <= 64");
    detail::require_finite(cfg.beta);
    validate_subgraph(cfg.h2);
    validate_subgraph(cfg.h3);
    detail::check_hom_budget(cfg.h2, cfg.n);
    detail::check_hom_budget(cfg.h3, cfg.n);
    if (!(cfg.burn_in >= 0 && cfg.sweeps > cfg.burn_in))
        throw DomainError("chain needs sweeps > burn_in >= 0");
    if (cfg.thin < 1) throw DomainError("chain needs thin >= 1");
}

struct ChainTrace {
    std::vector<std::int64_t> sample_sweeps;         // absolute sweep index per row
    std::vector<std::array<double, 3>> samples;      // (t_edge, t_h2, t_h3)
    std::int64_t updates = 0;
    std::int64_t flips = 0;
    GraphState final_state;
};

namespace detail {

struct RunningCounts {
    std::int64_t edges = 0;
    std::int64_t hom2 = 0;
    std::int64_t hom3 = 0;
};

// One heat-bath pass: every pair once, in a fresh seeded shuffle, each edge
// redrawn from its exact conditional given the rest of the graph.  The
// conditional odds come from the Hamiltonian difference of the two states
// of this single edge, built from the incremental homomorphism deltas.
inline void sweep_inplace(GraphState& state, const ChainConfig& cfg, SplitMix64& rng,
                          const std::vector<std::pair<int, int>>& pairs,
                          std::vector<std::uint32_t>& perm, RunningCounts& counts,
                          std::int64_t& flips) {
    const double nn = double(cfg.n) * cfg.n;
    const double scale2 = nn / ipow(double(cfg.n), cfg.h2.n_vertices);
    const double scale3 = nn / ipow(double(cfg.n), cfg.h3.n_vertices);

    const std::size_t m = pairs.size();
    perm.resize(m);
    for (std::size_t t = 0; t < m; ++t) perm[t] = std::uint32_t(t);
    for (std::size_t t = m - 1; t > 0; --t)
        std::swap(perm[t], perm[rng.below(t + 1)]);

    for (std::size_t t = 0; t < m; ++t) {
        const auto [i, j] = pairs[perm[t]];
        const std::int64_t d2 = hom_delta_count(cfg.h2, state, i, j);
        const std::int64_t d3 = hom_delta_count(cfg.h3, state, i, j);
        const double dh = 2.0 * cfg.beta.beta1 + cfg.beta.beta2 * scale2 * double(d2) +
                          cfg.beta.beta3 * scale3 * double(d3);
        const bool present = rng.uniform() < 1.0 / (1.0 + std::exp(-dh));
        const bool was = state.has_edge(i, j);
        if (present != was) {
            state.set_edge(i, j, present);
            const std::int64_t sign = present ? 1 : -1;
            counts.edges += sign;
            counts.hom2 += sign * d2;
            counts.hom3 += sign * d3;
            ++flips;
        }
    }
}

} // namespace detail

// Single exposed sweep over a copy of the state; the homomorphism counts are
// rebuilt from scratch since no running tally is available here.
inline GraphState gibbs_sweep(GraphState state, const ChainConfig& cfg, SplitMix64& rng) {
    validate_chain_config(cfg);
    if (state.n != cfg.n) throw DomainError("state size does not match the config");
    detail::RunningCounts counts;
    counts.edges = state.edge_count();
    counts.hom2 = hom_count(cfg.h2, state);
    counts.hom3 = hom_count(cfg.h3, state);
    const auto pairs = lexicographic_pairs(cfg.n);
    std::vector<std::uint32_t> perm;
    std::int64_t flips = 0;
    detail::sweep_inplace(state, cfg, rng, pairs, perm, counts, flips);
    return state;
}

// Full chain from the empty graph, deterministic in the seed.  Densities are
// tracked incrementally as exact integer homomorphism counts; recomputing
// them from scratch at any time matches bit for bit.
inline ChainTrace run_chain(const ChainConfig& cfg) {
    validate_chain_config(cfg);
    GraphState state(cfg.n);
    SplitMix64 rng(cfg.seed);
    const auto pairs = lexicographic_pairs(cfg.n);
    std::vector<std::uint32_t> perm;

    detail::RunningCounts counts;
    ChainTrace trace;
    const double nn = double(cfg.n) * cfg.n;
    const double denom2 = detail::ipow(double(cfg.n), cfg.h2.n_vertices);
    const double denom3 = detail::ipow(double(cfg.n), cfg.h3.n_vertices);

    for (std::int64_t sweep = 1; sweep <= cfg.sweeps; ++sweep) {
        detail::sweep_inplace(state, cfg, rng, pairs, perm, counts, trace.flips);
        trace.updates += std::int64_t(pairs.size());
        if (sweep > cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0) {
            trace.sample_sweeps.push_back(sweep);
            trace.samples.push_back({2.0 * double(counts.edges) / nn,
                                     double(counts.hom2) / denom2,
                                     double(counts.hom3) / denom3});
        }
    }
    trace.final_state = state;
    return trace;
}

// Trace serialization: one comment line carrying the config and the RNG
// identifier, a column header, then one row per retained sample.
inline void write_trace_csv(std::ostream& out, const ChainConfig& cfg,
                            const ChainTrace& trace) {
    out << "# rng=" << rng_identifier << " n=" << cfg.n
        << " beta1=" << format_double(cfg.beta.beta1)
        << " beta2=" << format_double(cfg.beta.beta2)
        << " beta3=" << format_double(cfg.beta.beta3) << " h2=\"" << format_subgraph(cfg.h2)
        << "\" h3=\"" << format_subgraph(cfg.h3) << "\" sweeps=" << cfg.sweeps
        << " burn_in=" << cfg.burn_in << " thin=" << cfg.thin
        << " seed=" << format_u64(cfg.seed) << "\n";
    out << "sweep,t_edge,t_h2,t_h3\n";
    for (std::size_t r = 0; r < trace.samples.size(); ++r) {
        out << trace.sample_sweeps[r] << "," << format_double(trace.samples[r][0]) << ","
            << format_double(trace.samples[r][1]) << ","
            << format_double(trace.samples[r][2]) << "\n";
    }
}

} // namespace ergphase
