#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ergphase/errors.hpp"

namespace ergphase {

// Small pattern graph bound to one interaction term.  Edges keep the order
// and orientation they were given in, so the text form round-trips byte for
// byte; validation only cares about the underlying unordered pair set.
struct SubgraphSpec {
    int n_vertices = 0;
    std::vector<std::pair<int, int>> edges;
};

inline void validate_subgraph(const SubgraphSpec& h) {
    if (h.n_vertices < 2) throw DomainError("subgraph needs at least 2 vertices");
    if (h.edges.empty()) throw DomainError("subgraph needs at least one edge");
    for (std::size_t a = 0; a < h.edges.size(); ++a) {
        const auto& [i, j] = h.edges[a];
        if (i < 0 || j < 0 || i >= h.n_vertices || j >= h.n_vertices)
            throw DomainError("subgraph edge endpoint out of range");
        if (i == j) throw DomainError("subgraph edges may not be loops");
        for (std::size_t b = 0; b < a; ++b) {
            const auto& [x, y] = h.edges[b];
            if ((x == i && y == j) || (x == j && y == i))
                throw DomainError("duplicate subgraph edge");
        }
    }
}

// Text form: "<n>; <i>-<j>,<i>-<j>,...", e.g. "3; 0-1,1-2,0-2".
inline std::string format_subgraph(const SubgraphSpec& h) {
    std::string out = std::to_string(h.n_vertices) + ";";
    bool first = true;
    for (const auto& [i, j] : h.edges) {
        out += first ? " " : ",";
        first = false;
        out += std::to_string(i) + "-" + std::to_string(j);
    }
    return out;
}

namespace detail {

inline const char* parse_int(const char* p, const char* end, int& out) {
    auto res = std::from_chars(p, end, out);
    if (res.ec != std::errc{} || res.ptr == p)
        throw DomainError("malformed subgraph text: expected an integer");
    return res.ptr;
}

} // namespace detail

inline SubgraphSpec parse_subgraph(const std::string& text) {
    SubgraphSpec h;
    const char* p = text.data();
    const char* end = p + text.size();
    p = detail::parse_int(p, end, h.n_vertices);
    if (p + 2 > end || p[0] != ';' || p[1] != ' ')
        throw DomainError("malformed subgraph text: expected \"; \" after the vertex count");
    p += 2;
    for (;;) {
        int i = 0, j = 0;
        p = detail::parse_int(p, end, i);
        if (p >= end || *p != '-')
            throw DomainError("malformed subgraph text: expected '-' inside an edge");
        p = detail::parse_int(p + 1, end, j);
        h.edges.emplace_back(i, j);
        if (p == end) break;
        if (*p != ',') throw DomainError("malformed subgraph text: expected ',' between edges");
        ++p;
    }
    validate_subgraph(h);
    return h;
}

inline SubgraphSpec single_edge() { return {2, {{0, 1}}}; }

inline SubgraphSpec triangle() { return {3, {{0, 1}, {1, 2}, {0, 2}}}; }

// Cycle on k vertices: consecutive edges then the closing chord, each pair
// written smaller endpoint first.
inline SubgraphSpec cycle(int k) {
    if (k < 3) throw DomainError("cycle needs at least 3 vertices");
    SubgraphSpec h;
    h.n_vertices = k;
    for (int i = 0; i + 1 < k; ++i) h.edges.emplace_back(i, i + 1);
    h.edges.emplace_back(0, k - 1);
    return h;
}

// Path with k edges on k+1 vertices.
inline SubgraphSpec path(int k) {
    if (k < 1) throw DomainError("path needs at least 1 edge");
    SubgraphSpec h;
    h.n_vertices = k + 1;
    for (int i = 0; i < k; ++i) h.edges.emplace_back(i, i + 1);
    return h;
}

// Simple graph on up to 64 vertices as bitmask adjacency rows.
struct GraphState {
    int n = 0;
    std::vector<std::uint64_t> rows;

    GraphState() = default;
    explicit GraphState(int n_vertices) : n(n_vertices), rows(n_vertices, 0) {
        if (n_vertices < 1 || n_vertices > 64)
            throw DomainError("GraphState supports 1 to 64 vertices");
    }

    bool has_edge(int i, int j) const { return (rows[i] >> j) & 1u; }

    void set_edge(int i, int j, bool present) {
        if (i == j) throw DomainError("graphs here are loop-free");
        if (present) {
            rows[i] |= std::uint64_t{1} << j;
            rows[j] |= std::uint64_t{1} << i;
        } else {
            rows[i] &= ~(std::uint64_t{1} << j);
            rows[j] &= ~(std::uint64_t{1} << i);
        }
    }

    int edge_count() const {
        int total = 0;
        for (std::uint64_t r : rows) total += std::popcount(r);
        return total / 2;
    }
};

// The fixed edge ordering every enumeration and sweep uses:
// (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline std::vector<std::pair<int, int>> lexicographic_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(std::size_t(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

// Graph whose edge set is the given bitmask under the lexicographic order.
inline GraphState graph_from_mask(int n, std::uint64_t mask) {
    GraphState g(n);
    int bit = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++bit)
            if ((mask >> bit) & 1u) g.set_edge(i, j, true);
    return g;
}

} // namespace ergphase
