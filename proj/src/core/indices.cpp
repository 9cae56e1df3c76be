#include "core/indices.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/parallel.hpp"

namespace dtilink {

namespace {

/// Accumulates the length-3 path aggregate for one drug into `row` (size
/// n_proteins). Weighted: each path drug-z1-z2-y adds w(d,z1)+w(z1,z2)+w(z2,y).
/// Unweighted: each path adds 1 (a plain count, exact in doubles).
///
/// The pairwise cn_score/jaccard_score go through this same kernel so the
/// full-table results are reproducible bit-for-bit pair by pair.
void cn_path_row(const BipartiteGraph& graph, uint32_t drug, bool weighted, double* row) {
    for (const AdjEntry& first : graph.adjacency(drug_node(drug))) {
        for (const AdjEntry& second : graph.adjacency(protein_node(first.to))) {
            const double base = first.weight + second.weight;
            for (const AdjEntry& third : graph.adjacency(drug_node(second.to))) {
                row[third.to] += weighted ? base + third.weight : 1.0;
            }
        }
    }
}

/// |Gamma(drug) ∩ second_neighborhood(protein)| over sorted vectors.
uint64_t intersection_size(std::span<const AdjEntry> drug_row,
                           const std::vector<uint32_t>& protein_two_hop) {
    uint64_t count = 0;
    auto it = protein_two_hop.begin();
    for (const AdjEntry& e : drug_row) {
        it = std::lower_bound(it, protein_two_hop.end(), e.to);
        if (it == protein_two_hop.end()) break;
        if (*it == e.to) ++count;
    }
    return count;
}

struct SetContext {
    uint64_t intersection;
    uint64_t union_size;
};

SetContext pair_set_context(const BipartiteGraph& graph, uint32_t drug, uint32_t protein) {
    auto drug_row = graph.adjacency(drug_node(drug));
    std::vector<uint32_t> two_hop = graph.second_neighborhood(protein_node(protein));
    uint64_t inter = intersection_size(drug_row, two_hop);
    uint64_t uni = drug_row.size() + two_hop.size() - inter;
    return {inter, uni};
}

double checked_degree_product(const BipartiteGraph& graph, uint32_t drug, uint32_t protein,
                              bool weighted) {
    if (weighted) {
        return graph.weighted_degree(drug_node(drug)) * graph.weighted_degree(protein_node(protein));
    }
    return static_cast<double>(graph.degree(drug_node(drug))) *
           static_cast<double>(graph.degree(protein_node(protein)));
}

void fill_cn_path(ScoreTable& table, const BipartiteGraph& graph, bool weighted, int threads) {
    parallel_chunks(graph.n_drugs(), threads, [&](size_t begin, size_t end) {
        for (size_t d = begin; d < end; ++d) {
            cn_path_row(graph, static_cast<uint32_t>(d), weighted, table.row(static_cast<uint32_t>(d)));
        }
    });
}

/// Column-oriented fill for the set-based scores: one pass per protein with a
/// bitmap of its two-hop neighbourhood, intersected against every drug row.
/// Jaccard reuses the pass; the weighted Jaccard numerator is the path
/// aggregate already present in the table from a prior row pass.
enum class SetMode { Cardinality, JaccardUnweighted, JaccardWeightedDivide };

void fill_set_based(ScoreTable& table, const BipartiteGraph& graph, SetMode mode, int threads) {
    const uint32_t n_proteins = graph.n_proteins();
    const uint32_t n_drugs = graph.n_drugs();
    const size_t words = (static_cast<size_t>(n_proteins) + 63) / 64;

    parallel_chunks(n_proteins, threads, [&](size_t begin, size_t end) {
        std::vector<uint64_t> bitmap(words, 0);
        for (size_t p = begin; p < end; ++p) {
            std::fill(bitmap.begin(), bitmap.end(), 0);
            std::vector<uint32_t> two_hop =
                graph.second_neighborhood(protein_node(static_cast<uint32_t>(p)));
            for (uint32_t q : two_hop) bitmap[q >> 6] |= 1ULL << (q & 63);
            const uint64_t two_hop_size = two_hop.size();

            for (uint32_t d = 0; d < n_drugs; ++d) {
                auto drug_row = graph.adjacency(drug_node(d));
                uint64_t inter = 0;
                for (const AdjEntry& e : drug_row) {
                    inter += (bitmap[e.to >> 6] >> (e.to & 63)) & 1ULL;
                }
                double* slot = table.row(d) + p;
                switch (mode) {
                    case SetMode::Cardinality:
                        *slot = static_cast<double>(inter);
                        break;
                    case SetMode::JaccardUnweighted: {
                        uint64_t uni = drug_row.size() + two_hop_size - inter;
                        *slot = uni == 0 ? 0.0
                                         : static_cast<double>(inter) / static_cast<double>(uni);
                        break;
                    }
                    case SetMode::JaccardWeightedDivide: {
                        uint64_t uni = drug_row.size() + two_hop_size - inter;
                        *slot = uni == 0 ? 0.0 : *slot / static_cast<double>(uni);
                        break;
                    }
                }
            }
        }
    });
}

void fill_pa(ScoreTable& table, const BipartiteGraph& graph, bool weighted, int threads) {
    std::vector<double> drug_deg(graph.n_drugs());
    std::vector<double> protein_deg(graph.n_proteins());
    for (uint32_t d = 0; d < graph.n_drugs(); ++d) {
        drug_deg[d] = weighted ? graph.weighted_degree(drug_node(d))
                               : static_cast<double>(graph.degree(drug_node(d)));
    }
    for (uint32_t p = 0; p < graph.n_proteins(); ++p) {
        protein_deg[p] = weighted ? graph.weighted_degree(protein_node(p))
                                  : static_cast<double>(graph.degree(protein_node(p)));
    }
    parallel_chunks(graph.n_drugs(), threads, [&](size_t begin, size_t end) {
        for (size_t d = begin; d < end; ++d) {
            double* row = table.row(static_cast<uint32_t>(d));
            for (uint32_t p = 0; p < graph.n_proteins(); ++p) {
                row[p] = drug_deg[d] * protein_deg[p];
            }
        }
    });
}

}  // namespace

void IndexConfig::validate() const {
    if (kind == IndexKind::Katz) {
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            raise(Errc::invalid_argument, "katz requires a finite beta > 0");
        }
        if (!(series_tol > 0.0)) {
            raise(Errc::invalid_argument, "series_tol must be > 0");
        }
        if (series_max_terms < 3) {
            raise(Errc::invalid_argument,
                  "series_max_terms must be at least 3 (length-3 paths carry the signal)");
        }
    }
    if (kind == IndexKind::CommonNeighbours || kind == IndexKind::Jaccard ||
        kind == IndexKind::PreferentialAttachment) {
        // nothing further to check
    }
}

std::string IndexConfig::name() const {
    std::string base;
    switch (kind) {
        case IndexKind::CommonNeighbours:
            base = cn_variant == CnVariant::SetCardinality ? "cn_set" : "cn";
            break;
        case IndexKind::Jaccard:
            base = "jaccard";
            break;
        case IndexKind::PreferentialAttachment:
            base = "pa";
            break;
        case IndexKind::Katz: {
            std::ostringstream s;
            s << "katz_b" << beta;
            base = s.str();
            break;
        }
    }
    if (weighted) base += "_w";
    return base;
}

ScoreTable::ScoreTable(std::shared_ptr<const BipartiteGraph> graph, IndexConfig config)
    : graph_(std::move(graph)), config_(std::move(config)) {
    n_drugs_ = graph_->n_drugs();
    n_proteins_ = graph_->n_proteins();
    fingerprint_ = graph_->fingerprint();

    const size_t cells = static_cast<size_t>(n_drugs_) * n_proteins_;
    values_.assign(cells, 0.0);
    observed_.assign((cells + 63) / 64, 0);
    for (uint32_t d = 0; d < n_drugs_; ++d) {
        for (const AdjEntry& e : graph_->adjacency(drug_node(d))) {
            size_t bit = static_cast<size_t>(d) * n_proteins_ + e.to;
            observed_[bit >> 6] |= 1ULL << (bit & 63);
        }
    }
    candidate_count_ = cells - graph_->edge_count();
}

void ScoreTable::clear_observed_slots() {
    for (uint32_t d = 0; d < n_drugs_; ++d) {
        for (const AdjEntry& e : graph_->adjacency(drug_node(d))) {
            values_[static_cast<size_t>(d) * n_proteins_ + e.to] = 0.0;
        }
    }
}

uint64_t ScoreTable::positive_count() const {
    // observed slots are zeroed, so any positive value belongs to a candidate
    uint64_t count = 0;
    for (double v : values_) count += v > 0.0;
    return count;
}

void ScoreTable::for_each_candidate(
    const std::function<void(uint32_t, uint32_t, double)>& fn) const {
    for (uint32_t d = 0; d < n_drugs_; ++d) {
        const double* row_values = row(d);
        for (uint32_t p = 0; p < n_proteins_; ++p) {
            if (is_candidate(d, p)) fn(d, p, row_values[p]);
        }
    }
}

PairScore cn_score(const BipartiteGraph& graph, uint32_t drug, uint32_t protein,
                   CnVariant variant, bool weighted) {
    PairScore out;
    out.observed = graph.has_edge(drug, protein);
    if (variant == CnVariant::SetCardinality) {
        // cardinality of a set: the weighted flag does not apply
        out.value = static_cast<double>(pair_set_context(graph, drug, protein).intersection);
        return out;
    }
    std::vector<double> row(graph.n_proteins(), 0.0);
    cn_path_row(graph, drug, weighted, row.data());
    out.value = row[protein];
    return out;
}

PairScore jaccard_score(const BipartiteGraph& graph, uint32_t drug, uint32_t protein,
                        bool weighted) {
    PairScore out;
    out.observed = graph.has_edge(drug, protein);
    SetContext ctx = pair_set_context(graph, drug, protein);
    if (ctx.union_size == 0) {
        out.value = 0.0;  // two isolated endpoints carry no evidence either way
        return out;
    }
    if (weighted) {
        std::vector<double> row(graph.n_proteins(), 0.0);
        cn_path_row(graph, drug, true, row.data());
        out.value = row[protein] / static_cast<double>(ctx.union_size);
    } else {
        out.value = static_cast<double>(ctx.intersection) / static_cast<double>(ctx.union_size);
    }
    return out;
}

PairScore pa_score(const BipartiteGraph& graph, uint32_t drug, uint32_t protein, bool weighted) {
    PairScore out;
    out.observed = graph.has_edge(drug, protein);
    out.value = checked_degree_product(graph, drug, protein, weighted);
    return out;
}

ScoreTable score_all(std::shared_ptr<const BipartiteGraph> graph, const IndexConfig& config,
                     int threads) {
    config.validate();
    if (config.kind == IndexKind::Katz) {
        return katz_scores(std::move(graph), config.beta, config.katz_method, config.series_tol,
                           config.series_max_terms, threads);
    }

    ScoreTable table(graph, config);
    const BipartiteGraph& g = *graph;
    switch (config.kind) {
        case IndexKind::CommonNeighbours:
            if (config.cn_variant == CnVariant::PathCount) {
                fill_cn_path(table, g, config.weighted, threads);
            } else {
                fill_set_based(table, g, SetMode::Cardinality, threads);
            }
            break;
        case IndexKind::Jaccard:
            if (config.weighted) {
                fill_cn_path(table, g, true, threads);
                fill_set_based(table, g, SetMode::JaccardWeightedDivide, threads);
            } else {
                fill_set_based(table, g, SetMode::JaccardUnweighted, threads);
            }
            break;
        case IndexKind::PreferentialAttachment:
            fill_pa(table, g, config.weighted, threads);
            break;
        case IndexKind::Katz:
            break;  // handled above
    }
    table.clear_observed_slots();
    return table;
}

}  // namespace dtilink
