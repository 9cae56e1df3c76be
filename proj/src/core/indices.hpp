#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/types.hpp"

namespace dtilink {

enum class IndexKind {
    CommonNeighbours,
    Jaccard,
    PreferentialAttachment,
    Katz,
};

/// The common-neighbours score comes in two shapes: the cardinality of
/// Gamma(drug) intersected with the two-hop neighbourhood of the protein, and
/// the path form that sums over every length-3 path (weighted by edge weights;
/// a plain count when unweighted). The path form is the default: it is the
/// only one with a well-defined weighted generalisation.
enum class CnVariant { PathCount, SetCardinality };

enum class KatzMethod {
    Auto,            // DirectSolve up to kKatzDirectSolveLimit nodes, series above
    DirectSolve,     // S = (I - beta*A)^-1 - I via a dense factorisation
    TruncatedSeries  // sum of beta^k A^k until the added term drops below tol
};

constexpr uint32_t kKatzDirectSolveLimit = 5000;

/// Reject beta at or above this fraction of 1/lambda_max so (I - beta*A)
/// stays well-conditioned.
constexpr double kKatzBetaMargin = 0.95;

struct IndexConfig {
    IndexKind kind = IndexKind::CommonNeighbours;
    CnVariant cn_variant = CnVariant::PathCount;
    bool weighted = false;
    double beta = 0.0;  // Katz only; must be set explicitly
    KatzMethod katz_method = KatzMethod::Auto;
    double series_tol = 1e-12;
    int series_max_terms = 50;

    /// Throws invalid_argument on out-of-range fields.
    void validate() const;

    /// Stable short name used for output files and plot legends,
    /// e.g. "cn", "cn_set", "jaccard_w", "katz_b0.005".
    std::string name() const;
};

/// Scores for every non-observed (drug, protein) pair of one training graph
/// under one config. Backed by a dense matrix plus an observed-pair bitmap;
/// observed slots are not part of the table.
class ScoreTable {
public:
    ScoreTable(std::shared_ptr<const BipartiteGraph> graph, IndexConfig config);

    const IndexConfig& config() const { return config_; }
    const BipartiteGraph& graph() const { return *graph_; }
    std::shared_ptr<const BipartiteGraph> graph_ptr() const { return graph_; }
    uint64_t graph_fingerprint() const { return fingerprint_; }

    uint32_t n_drugs() const { return n_drugs_; }
    uint32_t n_proteins() const { return n_proteins_; }

    bool is_candidate(uint32_t drug, uint32_t protein) const {
        size_t bit = index(drug, protein);
        return (observed_[bit >> 6] & (1ULL << (bit & 63))) == 0;
    }

    /// Score of a candidate pair; 0.0 slots for observed pairs exist in the
    /// backing store but are not table entries (check is_candidate()).
    double at(uint32_t drug, uint32_t protein) const { return values_[index(drug, protein)]; }

    uint64_t candidate_count() const { return candidate_count_; }
    uint64_t positive_count() const;

    void for_each_candidate(
        const std::function<void(uint32_t, uint32_t, double)>& fn) const;

    // scoring kernels write rows directly
    double* row(uint32_t drug) { return values_.data() + static_cast<size_t>(drug) * n_proteins_; }
    const double* row(uint32_t drug) const {
        return values_.data() + static_cast<size_t>(drug) * n_proteins_;
    }
    /// Zeroes every observed slot; called once after the kernels fill rows.
    void clear_observed_slots();

private:
    size_t index(uint32_t drug, uint32_t protein) const {
        return static_cast<size_t>(drug) * n_proteins_ + protein;
    }

    std::shared_ptr<const BipartiteGraph> graph_;
    IndexConfig config_;
    uint32_t n_drugs_;
    uint32_t n_proteins_;
    uint64_t fingerprint_;
    uint64_t candidate_count_;
    std::vector<double> values_;
    std::vector<uint64_t> observed_;
};

/// Pairwise score plus whether the pair is already an edge of the graph.
/// Observed pairs are scored anyway; the caller decides whether to use them.
struct PairScore {
    double value = 0.0;
    bool observed = false;
};

PairScore cn_score(const BipartiteGraph& graph, uint32_t drug, uint32_t protein,
                   CnVariant variant, bool weighted);
PairScore jaccard_score(const BipartiteGraph& graph, uint32_t drug, uint32_t protein,
                        bool weighted);
PairScore pa_score(const BipartiteGraph& graph, uint32_t drug, uint32_t protein, bool weighted);

/// Full Katz score table: S = sum_{k>=1} beta^k A^k over the unified
/// adjacency, drug x protein block. Validates beta against the spectral
/// radius (BetaTooLarge beyond the margin) before computing.
ScoreTable katz_scores(std::shared_ptr<const BipartiteGraph> graph, double beta,
                       KatzMethod method, double series_tol, int series_max_terms,
                       int threads = 0);

/// One score per non-observed pair. Pairwise functions above reproduce these
/// values bit-for-bit (they share the per-row kernels). Deterministic for a
/// fixed graph and config regardless of `threads`.
ScoreTable score_all(std::shared_ptr<const BipartiteGraph> graph, const IndexConfig& config,
                     int threads = 0);

}  // namespace dtilink
