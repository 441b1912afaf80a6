#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nodeid {

using Node = std::uint32_t;
using Edge = std::pair<Node, Node>;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Immutable simple undirected graph stored as sorted adjacency lists (CSR).
///
/// Construction validates simplicity: no self-loops, no parallel edges, and
/// endpoints in range. Connectivity is not required here; `is_connected()`
/// reports it and callers that need it check.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from an undirected edge list. Throws std::invalid_argument
    /// on self-loops, duplicate edges, out-of-range endpoints, or when
    /// `r_hint` is given and some node has a different degree.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                            std::optional<int> r_hint = std::nullopt);

    std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return adjacency_.size() / 2; }
    std::optional<int> r_hint() const { return r_hint_; }

    std::span<const Node> neighbors(Node v) const {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }
    std::size_t degree(Node v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(Node u, Node v) const;

    /// Edges with u < v in lexicographic order.
    std::vector<Edge> edges() const;

    bool is_connected() const;
    /// Common degree if every node has the same degree, else nullopt.
    std::optional<int> regular_degree() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<Node> adjacency_;
    std::optional<int> r_hint_;
};

struct DistanceField {
    Node source = 0;
    std::vector<std::uint32_t> dist;  // kUnreachable for other components
};

struct RegularGraphOptions {
    /// Full restarts allowed before giving up; 0 selects the default of 10·n.
    std::size_t max_restarts = 0;
};

/// Samples a simple connected r-regular graph on n labeled nodes with the
/// pairing (configuration) model. Any self-loop, multi-edge, or disconnected
/// outcome triggers a full restart. Deterministic in (n, r, seed).
Graph generate_random_regular(std::size_t n, int r, std::uint64_t seed,
                              RegularGraphOptions options = {});

DistanceField bfs_distances(const Graph& g, Node source);

/// Throws std::domain_error for disconnected graphs.
int diameter(const Graph& g);

/// True iff the subgraph induced on the radius-`radius` ball around v is acyclic.
bool ball_is_tree(const Graph& g, Node v, int radius);

/// Full structural audit used by generator tests and the loader.
struct GraphAudit {
    bool ok = true;
    std::vector<std::string> problems;
};
GraphAudit audit(const Graph& g);

/// All-pairs hop distances for connected graphs with diameter < 65535.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(const Graph& g);

    std::size_t size() const { return n_; }
    std::uint16_t operator()(Node u, Node v) const { return d_[std::size_t(u) * n_ + v]; }
    std::span<const std::uint16_t> row(Node u) const {
        return {d_.data() + std::size_t(u) * n_, n_};
    }
    int max() const;

private:
    std::size_t n_ = 0;
    std::vector<std::uint16_t> d_;
};

// Edge-list text format: "n r" header (r = 0 when irregular), then one
// "u v" line per edge with u < v, sorted, LF endings.
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::string& path, const Graph& g);
Graph read_edge_list(std::istream& in);
Graph read_edge_list(const std::string& path);

// Small named graphs for tests and examples.
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph star_graph(std::size_t leaves);
Graph petersen_graph();
/// r-regular tree truncated at `depth`: root 0, interior degree r, leaves degree 1.
Graph truncated_regular_tree(int r, int depth);

}  // namespace nodeid
