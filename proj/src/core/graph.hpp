#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/types.hpp"

namespace dtilink {

/// Interned node identifiers for one dataset: every external drug/protein
/// token maps to a dense index assigned in first-appearance order. A universe
/// can be wider than any one training graph so that nodes isolated by fold
/// removal keep their indices.
class NodeUniverse {
public:
    static NodeUniverse from_interactions(std::span<const Interaction> interactions);

    uint32_t n_drugs() const { return static_cast<uint32_t>(drug_ids_.size()); }
    uint32_t n_proteins() const { return static_cast<uint32_t>(protein_ids_.size()); }

    const std::string& drug_id(uint32_t index) const { return drug_ids_.at(index); }
    const std::string& protein_id(uint32_t index) const { return protein_ids_.at(index); }

    /// Returns UINT32_MAX when the token is unknown.
    uint32_t drug_index(const std::string& id) const;
    uint32_t protein_index(const std::string& id) const;

    const std::vector<std::string>& drug_ids() const { return drug_ids_; }
    const std::vector<std::string>& protein_ids() const { return protein_ids_; }

private:
    std::vector<std::string> drug_ids_;
    std::vector<std::string> protein_ids_;
    std::unordered_map<std::string, uint32_t> drug_index_;
    std::unordered_map<std::string, uint32_t> protein_index_;
};

/// Collapse duplicate (drug, protein) pairs. Unweighted mode keeps presence
/// only (all weights become 1.0); weighted mode merges weights per `rule`.
/// Pair order follows the first occurrence of each pair. Rows with
/// non-positive weight raise InvalidWeight.
std::vector<Interaction> deduplicate(std::span<const Interaction> interactions,
                                     bool weighted, DedupRule rule);

struct GraphOptions {
    bool weighted = false;
    DedupRule dedup = DedupRule::Sum;
};

struct AdjEntry {
    uint32_t to;     // opposite-side dense index
    double weight;   // > 0
};

/// Immutable weighted bipartite graph. The biadjacency matrix is stored as
/// two mutually transposed adjacency lists (rows over drugs, rows over
/// proteins), each sorted by neighbour index. Safe for concurrent reads.
class BipartiteGraph {
public:
    static std::shared_ptr<const BipartiteGraph> build(
        std::span<const Interaction> interactions, const GraphOptions& options = {});

    /// Same as build() but over a fixed node universe, which may contain
    /// nodes that no interaction touches (they stay as isolated nodes).
    static std::shared_ptr<const BipartiteGraph> build_with_universe(
        NodeUniverse universe, std::span<const Interaction> interactions,
        const GraphOptions& options = {});

    uint32_t n_drugs() const { return universe_.n_drugs(); }
    uint32_t n_proteins() const { return universe_.n_proteins(); }
    uint32_t side_count(Side side) const {
        return side == Side::Drug ? n_drugs() : n_proteins();
    }
    uint64_t edge_count() const { return edge_count_; }
    bool weighted() const { return options_.weighted; }
    const GraphOptions& options() const { return options_; }
    const NodeUniverse& universe() const { return universe_; }

    const std::string& drug_id(uint32_t index) const { return universe_.drug_id(index); }
    const std::string& protein_id(uint32_t index) const { return universe_.protein_id(index); }

    /// Biadjacency row/column as (neighbour, weight) pairs sorted by index.
    std::span<const AdjEntry> adjacency(NodeRef node) const;

    /// Opposite-side neighbour indices, sorted ascending.
    std::vector<uint32_t> neighbors(NodeRef node) const;

    /// Union of the neighbour sets of `node`'s neighbours: a sorted set of
    /// same-side indices (two hops away). Empty for isolated nodes.
    std::vector<uint32_t> second_neighborhood(NodeRef node) const;

    uint32_t degree(NodeRef node) const;
    double weighted_degree(NodeRef node) const;

    bool has_edge(uint32_t drug, uint32_t protein) const;
    /// B[drug][protein]; 0.0 when the pair is non-observed.
    double weight(uint32_t drug, uint32_t protein) const;

    /// Structural hash over dimensions, edges and weights. Two graphs with
    /// identical dense structure share a fingerprint.
    uint64_t fingerprint() const { return fingerprint_; }

    /// Exhaustive cross-check of the stored representations; throws on any
    /// inconsistency. Test/debug helper.
    void validate() const;

private:
    void check_node(NodeRef node) const;

    NodeUniverse universe_;
    GraphOptions options_;
    std::vector<std::vector<AdjEntry>> drug_adj_;
    std::vector<std::vector<AdjEntry>> protein_adj_;
    uint64_t edge_count_ = 0;
    uint64_t fingerprint_ = 0;
};

/// Square symmetric adjacency [[0, B], [B^T, 0]] over drugs-then-proteins,
/// stored as CSR. Materialised on demand for the Katz index and diagnostics.
class UnifiedAdjacency {
public:
    static UnifiedAdjacency from_graph(const BipartiteGraph& graph);

    uint32_t dim() const { return dim_; }
    uint32_t n_drugs() const { return n_drugs_; }
    size_t nnz() const { return col_.size(); }

    double entry(uint32_t row, uint32_t col) const;

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;

    std::span<const size_t> row_ptr() const { return row_ptr_; }
    std::span<const uint32_t> col() const { return col_; }
    std::span<const double> val() const { return val_; }

private:
    uint32_t dim_ = 0;
    uint32_t n_drugs_ = 0;
    std::vector<size_t> row_ptr_;
    std::vector<uint32_t> col_;
    std::vector<double> val_;
};

struct SpectralOptions {
    double tol = 1e-10;
    int max_iterations = 20000;
};

/// Largest eigenvalue of the symmetric non-negative matrix A, estimated by
/// power iteration on A^2 (the bipartite spectrum is symmetric about zero,
/// so iterating on A alone can stall between the +/- lambda_max pair).
/// Returns 0 for the zero matrix; throws SpectralEstimateFailed when the
/// iteration cap is hit, with the best estimate in the message.
double spectral_radius(const UnifiedAdjacency& adjacency, const SpectralOptions& options = {});

}  // namespace dtilink
