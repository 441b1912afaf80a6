#include "nodeid/graph.hpp"

#include "nodeid/random.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nodeid {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges, std::optional<int> r_hint) {
    if (n == 0) throw std::invalid_argument("graph must have at least one node");
    std::vector<std::size_t> degree(n, 0);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop at node " + std::to_string(u));
        ++degree[u];
        ++degree[v];
    }
    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
    g.adjacency_.resize(g.offsets_[n]);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : edges) {
        g.adjacency_[fill[u]++] = v;
        g.adjacency_[fill[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) {
        auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
        auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
        std::sort(first, last);
        if (std::adjacent_find(first, last) != last)
            throw std::invalid_argument("parallel edge at node " + std::to_string(v));
    }
    if (r_hint) {
        if (*r_hint < 0) throw std::invalid_argument("negative degree hint");
        for (std::size_t v = 0; v < n; ++v) {
            if (degree[v] != static_cast<std::size_t>(*r_hint))
                throw std::invalid_argument("node " + std::to_string(v) + " has degree " +
                                            std::to_string(degree[v]) + ", expected " +
                                            std::to_string(*r_hint));
        }
    }
    g.r_hint_ = r_hint;
    return g;
}

bool Graph::has_edge(Node u, Node v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (Node u = 0; u < node_count(); ++u)
        for (Node v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

bool Graph::is_connected() const {
    if (node_count() == 0) return false;
    const auto field = bfs_distances(*this, 0);
    return std::none_of(field.dist.begin(), field.dist.end(),
                        [](std::uint32_t d) { return d == kUnreachable; });
}

std::optional<int> Graph::regular_degree() const {
    if (node_count() == 0) return std::nullopt;
    const auto d0 = degree(0);
    for (Node v = 1; v < node_count(); ++v)
        if (degree(v) != d0) return std::nullopt;
    return static_cast<int>(d0);
}

namespace {

// One pairing-model draw; nullopt when the multigraph is not simple.
std::optional<std::vector<Edge>> pair_stubs(std::size_t n, int r, Rng& rng) {
    std::vector<Node> stubs(n * static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Node>(i / r);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<Edge> edges;
    edges.reserve(stubs.size() / 2);
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
        Node u = stubs[i], v = stubs[i + 1];
        if (u == v) return std::nullopt;
        if (u > v) std::swap(u, v);
        edges.emplace_back(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) return std::nullopt;
    return edges;
}

}  // namespace

Graph generate_random_regular(std::size_t n, int r, std::uint64_t seed,
                              RegularGraphOptions options) {
    if (r < 3) throw std::invalid_argument("degree r must be at least 3");
    if (n == 0) throw std::invalid_argument("n must be positive");
    if ((n * static_cast<std::size_t>(r)) % 2 != 0)
        throw std::invalid_argument("n*r must be even (n=" + std::to_string(n) +
                                    ", r=" + std::to_string(r) + ")");
    if (static_cast<std::size_t>(r) >= n)
        throw std::invalid_argument("degree r must be smaller than n");
    const std::size_t cap = options.max_restarts ? options.max_restarts : 10 * n;

    Rng rng(stream_seed(seed, 0x7265677572ULL));
    for (std::size_t attempt = 0; attempt <= cap; ++attempt) {
        auto edges = pair_stubs(n, r, rng);
        if (!edges) continue;
        Graph g = Graph::from_edges(n, *edges, r);
        if (g.is_connected()) return g;
    }
    throw std::runtime_error("random regular generation failed after " + std::to_string(cap) +
                             " restarts (n=" + std::to_string(n) + ", r=" + std::to_string(r) + ")");
}

DistanceField bfs_distances(const Graph& g, Node source) {
    if (source >= g.node_count()) throw std::out_of_range("BFS source out of range");
    DistanceField field{source, std::vector<std::uint32_t>(g.node_count(), kUnreachable)};
    std::vector<Node> queue;
    queue.reserve(g.node_count());
    queue.push_back(source);
    field.dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Node u = queue[head];
        for (Node w : g.neighbors(u)) {
            if (field.dist[w] == kUnreachable) {
                field.dist[w] = field.dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    return field;
}

int diameter(const Graph& g) {
    std::uint32_t best = 0;
    for (Node s = 0; s < g.node_count(); ++s) {
        const auto field = bfs_distances(g, s);
        for (auto d : field.dist) {
            if (d == kUnreachable) throw std::domain_error("diameter of a disconnected graph");
            best = std::max(best, d);
        }
    }
    return static_cast<int>(best);
}

bool ball_is_tree(const Graph& g, Node v, int radius) {
    if (radius < 0) throw std::invalid_argument("radius must be non-negative");
    if (v >= g.node_count()) throw std::out_of_range("node out of range");
    // Truncated BFS; the ball is connected, so it is a tree iff |E| = |V| - 1.
    std::vector<std::uint32_t> dist(g.node_count(), kUnreachable);
    std::vector<Node> ball{v};
    dist[v] = 0;
    for (std::size_t head = 0; head < ball.size(); ++head) {
        const Node u = ball[head];
        if (dist[u] == static_cast<std::uint32_t>(radius)) continue;
        for (Node w : g.neighbors(u)) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[u] + 1;
                ball.push_back(w);
            }
        }
    }
    std::size_t twice_edges = 0;
    for (Node u : ball)
        for (Node w : g.neighbors(u))
            if (dist[w] != kUnreachable) ++twice_edges;
    return twice_edges / 2 + 1 == ball.size();
}

GraphAudit audit(const Graph& g) {
    GraphAudit result;
    auto fail = [&](std::string msg) {
        result.ok = false;
        result.problems.push_back(std::move(msg));
    };
    const auto n = g.node_count();
    if (n == 0) {
        fail("empty graph");
        return result;
    }
    for (Node u = 0; u < n; ++u) {
        auto nb = g.neighbors(u);
        if (!std::is_sorted(nb.begin(), nb.end())) fail("unsorted adjacency at " + std::to_string(u));
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            fail("parallel edge at " + std::to_string(u));
        for (Node w : nb) {
            if (w >= n) fail("out-of-range neighbor at " + std::to_string(u));
            else if (w == u) fail("self-loop at " + std::to_string(u));
            else if (!g.has_edge(w, u)) fail("asymmetric edge " + std::to_string(u) + "-" + std::to_string(w));
        }
        if (g.r_hint() && g.degree(u) != static_cast<std::size_t>(*g.r_hint()))
            fail("degree mismatch at " + std::to_string(u));
    }
    if (!g.is_connected()) fail("disconnected");
    return result;
}

DistanceMatrix::DistanceMatrix(const Graph& g) : n_(g.node_count()), d_(n_ * n_) {
    for (Node s = 0; s < n_; ++s) {
        const auto field = bfs_distances(g, s);
        for (Node v = 0; v < n_; ++v) {
            if (field.dist[v] == kUnreachable)
                throw std::domain_error("distance matrix of a disconnected graph");
            if (field.dist[v] >= 0xffff) throw std::overflow_error("hop distance exceeds 16 bits");
            d_[std::size_t(s) * n_ + v] = static_cast<std::uint16_t>(field.dist[v]);
        }
    }
}

int DistanceMatrix::max() const {
    return d_.empty() ? 0 : *std::max_element(d_.begin(), d_.end());
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.node_count() << ' ' << (g.r_hint() ? *g.r_hint() : 0) << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list(const std::string& path, const Graph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_edge_list(out, g);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Graph read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("edge list: missing header");
    std::istringstream header(line);
    long long n = 0, r = -1;
    if (!(header >> n >> r) || n <= 0 || r < 0)
        throw std::runtime_error("edge list: malformed header '" + line + "'");
    std::vector<Edge> edges;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        long long u = -1, v = -1;
        std::string extra;
        if (!(row >> u >> v) || (row >> extra) || u < 0 || v < 0)
            throw std::runtime_error("edge list: malformed line " + std::to_string(lineno));
        if (u >= n || v >= n)
            throw std::runtime_error("edge list: node out of range on line " + std::to_string(lineno));
        edges.emplace_back(static_cast<Node>(std::min(u, v)), static_cast<Node>(std::max(u, v)));
    }
    try {
        return Graph::from_edges(static_cast<std::size_t>(n), edges,
                                 r > 0 ? std::optional<int>(static_cast<int>(r)) : std::nullopt);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("edge list: ") + e.what());
    }
}

Graph read_edge_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_edge_list(in);
}

Graph path_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Node i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return Graph::from_edges(n, edges);
}

Graph cycle_graph(std::size_t n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 nodes");
    std::vector<Edge> edges;
    for (Node i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    edges.emplace_back(0, static_cast<Node>(n - 1));
    return Graph::from_edges(n, edges, 2);
}

Graph complete_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Node u = 0; u < n; ++u)
        for (Node v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return Graph::from_edges(n, edges, static_cast<int>(n - 1));
}

Graph star_graph(std::size_t leaves) {
    std::vector<Edge> edges;
    for (Node v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
    return Graph::from_edges(leaves + 1, edges);
}

Graph petersen_graph() {
    std::vector<Edge> edges;
    for (Node i = 0; i < 5; ++i) {
        edges.emplace_back(i, (i + 1) % 5);
        edges.emplace_back(i, i + 5);
        edges.emplace_back(i + 5, (i + 2) % 5 + 5);
    }
    for (auto& [u, v] : edges)
        if (u > v) std::swap(u, v);
    return Graph::from_edges(10, edges, 3);
}

Graph truncated_regular_tree(int r, int depth) {
    if (r < 2 || depth < 0) throw std::invalid_argument("invalid tree parameters");
    std::vector<Edge> edges;
    std::vector<Node> frontier{0};
    Node next = 1;
    for (int level = 0; level < depth; ++level) {
        std::vector<Node> children;
        for (Node parent : frontier) {
            const int fanout = level == 0 ? r : r - 1;
            for (int c = 0; c < fanout; ++c) {
                edges.emplace_back(parent, next);
                children.push_back(next++);
            }
        }
        frontier = std::move(children);
    }
    return Graph::from_edges(next, edges);
}

}  // namespace nodeid
