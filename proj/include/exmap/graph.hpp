#pragma once

#include <string>
#include <utility>
#include <vector>

#include "exmap/rng.hpp"

namespace exmap {

// Directed interference network over units 0..n-1. adjacency row i holds the
// peers of i, i.e. the units that affect i. Rows are sorted, self-loops are
// rejected. Immutable once built; share freely across threads.
class Network {
public:
    explicit Network(int n);

    // edges are (i, j) meaning "j affects i"; symmetrized when undirected.
    static Network from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                              bool undirected);

    int size() const { return static_cast<int>(peers_.size()); }
    const std::vector<int>& peers(int i) const;
    std::vector<int> closed_neighborhood(int i) const;
    bool has_edge(int i, int j) const;  // j affects i
    int edge_count() const;

    bool operator==(const Network& other) const { return peers_ == other.peers_; }

private:
    std::vector<std::vector<int>> peers_;
};

// Undirected graph on an arbitrary subset of unit ids (no self-loops).
class SimpleGraph {
public:
    explicit SimpleGraph(std::vector<int> vertices);

    void add_edge(int u, int v);  // unit ids, not positions
    const std::vector<int>& vertices() const { return vertices_; }
    int degree_of(int vertex_pos) const { return static_cast<int>(adj_[vertex_pos].size()); }
    bool has_edge(int u, int v) const;
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const;
    const std::vector<int>& neighbors_pos(int vertex_pos) const { return adj_[vertex_pos]; }
    int position_of(int vertex) const;  // -1 if absent

private:
    std::vector<int> vertices_;          // sorted unit ids
    std::vector<std::vector<int>> adj_;  // positions into vertices_, sorted
};

// G(n, p): each unordered pair is an edge independently with probability p,
// stored symmetrically.
Network erdos_renyi(int n, double p, Rng& rng);

// Graph on `vertices` with an edge {i, j} whenever the closed neighborhoods
// of i and j intersect.
SimpleGraph common_friend_graph(const Network& net, const std::vector<int>& vertices);

// Maximal independent set, greedy in ascending-degree order with seeded
// random tie-breaks.
std::vector<int> greedy_independent_set(const SimpleGraph& g, Rng& rng);

// Edge-list file format: header "from,to", one "a,b" line per edge, 1-based.
// Saving with undirected=true requires a symmetric network and writes each
// edge once. Loading with n < 1 infers the unit count from the largest id in
// the file; isolated trailing units then need an explicit n (e.g. taken from
// the unit table).
void save_edge_list(const Network& net, const std::string& path, bool undirected = false);
Network load_edge_list(const std::string& path, bool undirected, int n = -1);

}  // namespace exmap
