#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ergphase/errors.hpp"
#include "ergphase/model.hpp"
#include "ergphase/solve.hpp"
#include "ergphase/subgraph.hpp"

namespace ergphase {

namespace detail {

constexpr double hom_map_budget = 1e8;

inline void check_hom_budget(const SubgraphSpec& h, int n) {
    if (std::pow(double(n), h.n_vertices) > hom_map_budget)
        throw ResourceError("homomorphism budget exceeded: " + std::to_string(n) + "^" +
                            std::to_string(h.n_vertices) + " vertex maps");
}

// Depth-first count of vertex maps.  Vertices are assigned in index order;
// each new image is drawn from the intersection of its already-assigned
// neighbors' adjacency rows, and the final level collapses to a popcount
// since all its constraints are known by then.
inline std::int64_t hom_dfs(const SubgraphSpec& h, const GraphState& g,
                            const std::vector<std::vector<int>>& earlier, int level,
                            std::array<int, 64>& image, std::uint64_t all_mask) {
    std::uint64_t candidates = all_mask;
    for (int w : earlier[level]) candidates &= g.rows[image[w]];
    if (level == h.n_vertices - 1) return std::popcount(candidates);
    std::int64_t total = 0;
    while (candidates) {
        const int x = std::countr_zero(candidates);
        candidates &= candidates - 1;
        image[level] = x;
        total += hom_dfs(h, g, earlier, level + 1, image, all_mask);
    }
    return total;
}

} // namespace detail

// Number of vertex maps from h into g that carry every edge of h onto an
// edge of g.  All maps count: not injective, not quotiented by symmetry.
inline std::int64_t hom_count(const SubgraphSpec& h, const GraphState& g) {
    validate_subgraph(h);
    if (g.n < 1) throw DomainError("target graph needs at least one vertex");
    detail::check_hom_budget(h, g.n);

    std::vector<std::vector<int>> earlier(h.n_vertices);
    for (const auto& [i, j] : h.edges) {
        if (i < j)
            earlier[j].push_back(i);
        else
            earlier[i].push_back(j);
    }
    std::array<int, 64> image{};
    const std::uint64_t all_mask =
        (g.n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << g.n) - 1);
    return detail::hom_dfs(h, g, earlier, 0, image, all_mask);
}

inline double hom_density(const SubgraphSpec& h, const GraphState& g) {
    return double(hom_count(h, g)) / detail::ipow(double(g.n), h.n_vertices);
}

// Full enumeration over all graphs on n vertices, with the three bound
// densities cached per graph so repeated coupling queries cost one pass
// over the table instead of recounting homomorphisms.
class ExactEnumerator {
public:
    ExactEnumerator(int n, SubgraphSpec h2, SubgraphSpec h3)
        : n_(n), h2_(std::move(h2)), h3_(std::move(h3)) {
        if (n < 2) throw DomainError("exact enumeration needs n >= 2");
        if (n > 6)
            throw ResourceError("exact enumeration stops at n = 6; the 2^21 graphs at "
                                "n = 7 exceed the desk-scale budget");
        validate_subgraph(h2_);
        validate_subgraph(h3_);
        detail::check_hom_budget(h2_, n);
        detail::check_hom_budget(h3_, n);

        const int m = n * (n - 1) / 2;
        const std::uint64_t graphs = std::uint64_t{1} << m;
        density_.resize(graphs);
        const double nn = double(n) * n;
        for (std::uint64_t mask = 0; mask < graphs; ++mask) {
            const GraphState g = graph_from_mask(n, mask);
            density_[mask] = {2.0 * std::popcount(mask) / nn, hom_density(h2_, g),
                              hom_density(h3_, g)};
        }
    }

    int n() const { return n_; }
    const SubgraphSpec& h2() const { return h2_; }
    const SubgraphSpec& h3() const { return h3_; }

    // Free energy density at finite n: log-sum-exp over all graphs of the
    // scaled Hamiltonian, max-shifted, divided by n^2.
    double psi(const BetaPoint& beta) const {
        detail::require_finite(beta);
        const double nn = double(n_) * n_;
        double peak = -std::numeric_limits<double>::infinity();
        for (const auto& d : density_)
            peak = std::max(peak, nn * (beta.beta1 * d[0] + beta.beta2 * d[1] +
                                        beta.beta3 * d[2]));
        double sum = 0.0;
        for (const auto& d : density_)
            sum += std::exp(nn * (beta.beta1 * d[0] + beta.beta2 * d[1] +
                                  beta.beta3 * d[2]) -
                            peak);
        return (peak + std::log(sum)) / nn;
    }

    // Exact Gibbs means of the three bound densities.
    std::array<double, 3> means(const BetaPoint& beta) const {
        detail::require_finite(beta);
        const double nn = double(n_) * n_;
        double peak = -std::numeric_limits<double>::infinity();
        for (const auto& d : density_)
            peak = std::max(peak, nn * (beta.beta1 * d[0] + beta.beta2 * d[1] +
                                        beta.beta3 * d[2]));
        double z = 0.0;
        std::array<double, 3> acc{};
        for (const auto& d : density_) {
            const double w = std::exp(
                nn * (beta.beta1 * d[0] + beta.beta2 * d[1] + beta.beta3 * d[2]) - peak);
            z += w;
            for (int k = 0; k < 3; ++k) acc[k] += w * d[k];
        }
        for (int k = 0; k < 3; ++k) acc[k] /= z;
        return acc;
    }

    // Exact Gibbs mean of an arbitrary target density, recounted per graph.
    double expectation(const BetaPoint& beta, const SubgraphSpec& target) const {
        validate_subgraph(target);
        detail::check_hom_budget(target, n_);
        detail::require_finite(beta);
        const double nn = double(n_) * n_;
        double peak = -std::numeric_limits<double>::infinity();
        for (const auto& d : density_)
            peak = std::max(peak, nn * (beta.beta1 * d[0] + beta.beta2 * d[1] +
                                        beta.beta3 * d[2]));
        double z = 0.0, acc = 0.0;
        for (std::uint64_t mask = 0; mask < density_.size(); ++mask) {
            const auto& d = density_[mask];
            const double w = std::exp(
                nn * (beta.beta1 * d[0] + beta.beta2 * d[1] + beta.beta3 * d[2]) - peak);
            z += w;
            acc += w * hom_density(target, graph_from_mask(n_, mask));
        }
        return acc / z;
    }

private:
    int n_;
    SubgraphSpec h2_, h3_;
    std::vector<std::array<double, 3>> density_;
};

inline double exact_psi_n(int n, const BetaPoint& beta, const SubgraphSpec& h2,
                          const SubgraphSpec& h3) {
    return ExactEnumerator(n, h2, h3).psi(beta);
}

inline double exact_expectation(int n, const BetaPoint& beta, const SubgraphSpec& h_target,
                                const SubgraphSpec& h2, const SubgraphSpec& h3) {
    return ExactEnumerator(n, h2, h3).expectation(beta, h_target);
}

} // namespace ergphase
