#include "exmap/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "exmap/errors.hpp"

namespace exmap {

Network::Network(int n) {
    if (n < 1) throw ValidationError("network size must be >= 1");
    peers_.resize(n);
}

Network Network::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                            bool undirected) {
    Network net(n);
    for (auto [i, j] : edges) {
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw ValidationError("edge endpoint out of range");
        if (i == j) throw ValidationError("self-loops are not allowed");
        net.peers_[i].push_back(j);
        if (undirected) net.peers_[j].push_back(i);
    }
    for (auto& row : net.peers_) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return net;
}

const std::vector<int>& Network::peers(int i) const {
    if (i < 0 || i >= size()) throw std::out_of_range("unit index out of range");
    return peers_[i];
}

std::vector<int> Network::closed_neighborhood(int i) const {
    const auto& p = peers(i);
    std::vector<int> out;
    out.reserve(p.size() + 1);
    out.insert(out.end(), p.begin(), p.end());
    out.insert(std::lower_bound(out.begin(), out.end(), i), i);
    return out;
}

bool Network::has_edge(int i, int j) const {
    const auto& p = peers(i);
    return std::binary_search(p.begin(), p.end(), j);
}

int Network::edge_count() const {
    int m = 0;
    for (const auto& row : peers_) m += static_cast<int>(row.size());
    return m;
}

SimpleGraph::SimpleGraph(std::vector<int> vertices) : vertices_(std::move(vertices)) {
    std::sort(vertices_.begin(), vertices_.end());
    vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
    adj_.resize(vertices_.size());
}

int SimpleGraph::position_of(int vertex) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), vertex);
    if (it == vertices_.end() || *it != vertex) return -1;
    return static_cast<int>(it - vertices_.begin());
}

void SimpleGraph::add_edge(int u, int v) {
    int pu = position_of(u), pv = position_of(v);
    if (pu < 0 || pv < 0) throw ValidationError("edge endpoint is not a vertex");
    if (pu == pv) throw ValidationError("self-loops are not allowed");
    if (std::binary_search(adj_[pu].begin(), adj_[pu].end(), pv)) return;
    adj_[pu].insert(std::upper_bound(adj_[pu].begin(), adj_[pu].end(), pv), pv);
    adj_[pv].insert(std::upper_bound(adj_[pv].begin(), adj_[pv].end(), pu), pu);
}

bool SimpleGraph::has_edge(int u, int v) const {
    int pu = position_of(u), pv = position_of(v);
    if (pu < 0 || pv < 0) return false;
    return std::binary_search(adj_[pu].begin(), adj_[pu].end(), pv);
}

int SimpleGraph::num_edges() const {
    int m = 0;
    for (const auto& row : adj_) m += static_cast<int>(row.size());
    return m / 2;
}

Network erdos_renyi(int n, double p, Rng& rng) {
    if (n < 1) throw ValidationError("erdos_renyi: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("erdos_renyi: p must be in [0, 1]");
    std::vector<std::pair<int, int>> edges;
    std::bernoulli_distribution coin(p);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
    return Network::from_edges(n, edges, /*undirected=*/true);
}

namespace {
bool sorted_intersect(const std::vector<int>& a, const std::vector<int>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib)
            ++ia;
        else if (*ib < *ia)
            ++ib;
        else
            return true;
    }
    return false;
}
}  // namespace

SimpleGraph common_friend_graph(const Network& net, const std::vector<int>& vertices) {
    for (int v : vertices)
        if (v < 0 || v >= net.size()) throw ValidationError("vertex outside the network");
    SimpleGraph g(vertices);
    const auto& vs = g.vertices();
    std::vector<std::vector<int>> closed(vs.size());
    for (size_t k = 0; k < vs.size(); ++k) closed[k] = net.closed_neighborhood(vs[k]);
    for (size_t a = 0; a < vs.size(); ++a)
        for (size_t b = a + 1; b < vs.size(); ++b)
            if (sorted_intersect(closed[a], closed[b])) g.add_edge(vs[a], vs[b]);
    return g;
}

std::vector<int> greedy_independent_set(const SimpleGraph& g, Rng& rng) {
    const int nv = g.num_vertices();
    std::vector<int> order(nv);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(),
                     [&g](int a, int b) { return g.degree_of(a) < g.degree_of(b); });

    std::vector<char> blocked(nv, 0);
    std::vector<int> selected;
    for (int pos : order) {
        if (blocked[pos]) continue;
        selected.push_back(g.vertices()[pos]);
        blocked[pos] = 1;
        for (int nb : g.neighbors_pos(pos)) blocked[nb] = 1;
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

void save_edge_list(const Network& net, const std::string& path, bool undirected) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "from,to\n";
    for (int i = 0; i < net.size(); ++i) {
        for (int j : net.peers(i)) {
            if (undirected) {
                if (!net.has_edge(j, i))
                    throw ValidationError("cannot save an asymmetric network as undirected");
                if (j < i) continue;
            }
            out << (i + 1) << "," << (j + 1) << "\n";
        }
    }
    if (!out) throw ValidationError("write failed: " + path);
}

Network load_edge_list(const std::string& path, bool undirected, int n) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open edge list: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("from,to", 0) != 0)
        throw ValidationError(path + ":1: expected header 'from,to'");
    std::vector<std::pair<int, int>> edges;
    int max_id = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        int a = 0, b = 0;
        char extra = 0;
        if (std::sscanf(line.c_str(), "%d,%d%c", &a, &b, &extra) < 2 || a < 1 || b < 1)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected 'from,to' with 1-based ids");
        edges.emplace_back(a - 1, b - 1);
        max_id = std::max({max_id, a, b});
    }
    if (n < 1) {
        if (max_id == 0) throw ValidationError(path + ": no units found and no unit count given");
        n = max_id;
    } else if (max_id > n) {
        throw ValidationError(path + ": edge id exceeds the declared unit count");
    }
    return Network::from_edges(n, edges, undirected);
}

}  // namespace exmap
