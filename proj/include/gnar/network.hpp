#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gnar {

/// Zero-based node index. File formats use one-based ids; conversion happens at the I/O boundary.
using NodeId = std::size_t;

struct Edge {
    NodeId from = 0;
    NodeId to = 0;
    double dist = 1.0;
    int covariate = 1;  // 1..C

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// How the entries of an adjacency matrix are read.
enum class AdjacencyKind {
    weights,    // entry is an un-normalised weight; edge length is its reciprocal
    distances,  // entry is the edge length itself
};

/// Observed nodes at one time point. An empty mask means "everything observed".
using ObservedMask = std::vector<bool>;

/// How unobserved nodes affect stage layering.
enum class MaskMode {
    reweight,  // layers from the full graph; unobserved neighbours get zero weight
    strict,    // unobserved nodes are deleted before layering
};

/**
 * @brief Immutable graph over the nodes of a network time series.
 *
 * Undirected edges are stored once with from < to and expanded in both
 * directions by out_arcs(). Each ordered pair carries at most one edge.
 */
class Network {
public:
    struct Arc {
        NodeId to;
        double dist;
        int covariate;
    };

    Network(std::vector<std::string> node_names, std::vector<Edge> edges, bool directed,
            int n_covariates = 1);

    /// Network with default names "1".."n".
    Network(std::size_t n_nodes, std::vector<Edge> edges, bool directed, int n_covariates = 1);

    /**
     * @brief Build a network from an adjacency matrix.
     *
     * Edge (i,j) exists iff A(i,j) > 0. The result is undirected when A is
     * symmetric (or when @p symmetrize is set, in which case the larger of
     * A(i,j), A(j,i) is used) and directed otherwise.
     *
     * @throws std::invalid_argument for non-square input, negative or
     *         non-finite entries, or a nonzero diagonal.
     */
    static Network from_adjacency(const Eigen::MatrixXd& adjacency, AdjacencyKind kind,
                                  bool symmetrize = false,
                                  std::vector<std::string> node_names = {});

    /// Adjacency matrix with both directions filled for undirected edges.
    Eigen::MatrixXd to_adjacency(AdjacencyKind kind = AdjacencyKind::distances) const;

    std::size_t n_nodes() const { return names_.size(); }
    const std::vector<std::string>& node_names() const { return names_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool directed() const { return directed_; }
    int n_covariates() const { return n_covariates_; }

    /// Outgoing arcs of a node, sorted by target.
    std::span<const Arc> out_arcs(NodeId node) const { return arcs_[node]; }

    /// Lookup of a node by name.
    std::optional<NodeId> find(const std::string& name) const;

private:
    void build();

    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    bool directed_ = false;
    int n_covariates_ = 1;
    std::vector<std::vector<Arc>> arcs_;
};

struct NeighbourSet {
    NodeId origin = 0;
    int stage = 1;
    std::vector<NodeId> members;  // ascending
};

/// Nodes first reached from @p origin after exactly @p stage hops.
NeighbourSet neighbour_set(const Network& net, NodeId origin, int stage,
                           const ObservedMask& mask = {}, MaskMode mode = MaskMode::reweight);

/**
 * @brief Breadth-first layers of @p origin up to @p max_stage.
 *
 * layers[0] = {origin}; layers[r] holds the stage-r neighbours. With
 * MaskMode::strict, unobserved nodes are removed from the graph first
 * (an unobserved origin has no layers beyond 0).
 */
std::vector<std::vector<NodeId>> stage_layers(const Network& net, NodeId origin, int max_stage,
                                              const ObservedMask& mask = {},
                                              MaskMode mode = MaskMode::reweight);

/// A stage-r neighbour with its shortest r-edge path length and covariate.
struct StageMember {
    NodeId node;
    double length;
    int covariate;
};

/**
 * @brief Stage-r members of @p origin with their path lengths.
 *
 * The length is the minimum over r-edge paths of summed edge distances.
 * Such paths visit one node per BFS layer, so a layered dynamic programme
 * finds them. The covariate is that of the final edge of the minimising
 * path; among equal-length paths the lexicographically smallest node
 * sequence wins.
 */
std::vector<StageMember> stage_members(const Network& net, NodeId origin, int stage,
                                       const ObservedMask& mask = {},
                                       MaskMode mode = MaskMode::reweight);

struct WeightEntry {
    NodeId node;
    int covariate;
    double weight;
};

struct WeightMap {
    NodeId origin = 0;
    int stage = 1;
    /// One entry per stage-r neighbour (unobserved ones carry weight 0).
    std::vector<WeightEntry> entries;

    double total() const;
    double weight_of(NodeId node) const;
};

/**
 * @brief Normalised inverse-distance connection weights of a node at one stage.
 *
 * Weights are d^{-1} / sum(d^{-1}) over the observed stage-r neighbours.
 * Unobserved neighbours keep their entry with weight 0.
 */
WeightMap connection_weights(const Network& net, NodeId origin, int stage,
                             const ObservedMask& mask = {}, MaskMode mode = MaskMode::reweight);

/// W^(r,c): row l holds the covariate-c weights of node l at stage r.
Eigen::MatrixXd weight_matrix(const Network& net, int stage, int covariate,
                              const ObservedMask& mask = {}, MaskMode mode = MaskMode::reweight);

/**
 * @brief Stage members of every node, computed once on the full graph.
 *
 * Used by the simulation, design and forecast code which repeatedly need
 * the same sets under changing observation masks.
 */
class StageTable {
public:
    StageTable(const Network& net, int max_stage);

    int max_stage() const { return max_stage_; }
    std::size_t n_nodes() const { return members_.size(); }

    /// Members of @p node at @p stage (1-based stage).
    std::span<const StageMember> members(NodeId node, int stage) const {
        return members_[node][static_cast<std::size_t>(stage - 1)];
    }

private:
    int max_stage_;
    std::vector<std::vector<std::vector<StageMember>>> members_;
};

}  // namespace gnar
