#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace dtilink {

namespace {

uint32_t intern(std::vector<std::string>& ids,
                std::unordered_map<std::string, uint32_t>& index,
                const std::string& token) {
    auto it = index.find(token);
    if (it != index.end()) return it->second;
    uint32_t slot = static_cast<uint32_t>(ids.size());
    ids.push_back(token);
    index.emplace(token, slot);
    return slot;
}

}  // namespace

NodeUniverse NodeUniverse::from_interactions(std::span<const Interaction> interactions) {
    NodeUniverse u;
    for (const Interaction& row : interactions) {
        intern(u.drug_ids_, u.drug_index_, row.drug);
        intern(u.protein_ids_, u.protein_index_, row.protein);
    }
    return u;
}

uint32_t NodeUniverse::drug_index(const std::string& id) const {
    auto it = drug_index_.find(id);
    return it == drug_index_.end() ? std::numeric_limits<uint32_t>::max() : it->second;
}

uint32_t NodeUniverse::protein_index(const std::string& id) const {
    auto it = protein_index_.find(id);
    return it == protein_index_.end() ? std::numeric_limits<uint32_t>::max() : it->second;
}

std::vector<Interaction> deduplicate(std::span<const Interaction> interactions,
                                     bool weighted, DedupRule rule) {
    std::vector<Interaction> out;
    out.reserve(interactions.size());
    std::unordered_map<std::string, size_t> slot_of;
    slot_of.reserve(interactions.size() * 2);

    size_t row_number = 0;
    for (const Interaction& row : interactions) {
        ++row_number;
        if (!(row.weight > 0.0)) {
            std::ostringstream msg;
            msg << "interaction " << row_number << " (" << row.drug << ", " << row.protein
                << ") has non-positive weight " << row.weight;
            raise(Errc::invalid_weight, msg.str());
        }
        double w = weighted ? row.weight : 1.0;
        // Tab never occurs inside a parsed token, so it is a safe separator.
        std::string key = row.drug + '\t' + row.protein;
        auto it = slot_of.find(key);
        if (it == slot_of.end()) {
            slot_of.emplace(std::move(key), out.size());
            out.push_back(Interaction{row.drug, row.protein, w});
            continue;
        }
        if (!weighted) continue;  // presence only
        double& stored = out[it->second].weight;
        switch (rule) {
            case DedupRule::Sum: stored += w; break;
            case DedupRule::Max: stored = std::max(stored, w); break;
            case DedupRule::First: break;
        }
    }
    return out;
}

std::shared_ptr<const BipartiteGraph> BipartiteGraph::build(
    std::span<const Interaction> interactions, const GraphOptions& options) {
    return build_with_universe(NodeUniverse::from_interactions(interactions), interactions,
                               options);
}

std::shared_ptr<const BipartiteGraph> BipartiteGraph::build_with_universe(
    NodeUniverse universe, std::span<const Interaction> interactions,
    const GraphOptions& options) {
    if (interactions.empty()) {
        raise(Errc::empty_dataset, "cannot build a graph from zero interactions");
    }

    auto graph = std::make_shared<BipartiteGraph>();
    graph->universe_ = std::move(universe);
    graph->options_ = options;
    graph->drug_adj_.resize(graph->n_drugs());
    graph->protein_adj_.resize(graph->n_proteins());

    std::vector<Interaction> edges = deduplicate(interactions, options.weighted, options.dedup);
    for (const Interaction& edge : edges) {
        uint32_t d = graph->universe_.drug_index(edge.drug);
        uint32_t p = graph->universe_.protein_index(edge.protein);
        if (d == std::numeric_limits<uint32_t>::max() ||
            p == std::numeric_limits<uint32_t>::max()) {
            raise(Errc::invalid_node,
                  "interaction (" + edge.drug + ", " + edge.protein +
                      ") references a node outside the fixed universe");
        }
        graph->drug_adj_[d].push_back({p, edge.weight});
        graph->protein_adj_[p].push_back({d, edge.weight});
    }
    graph->edge_count_ = edges.size();

    auto by_index = [](const AdjEntry& a, const AdjEntry& b) { return a.to < b.to; };
    for (auto& row : graph->drug_adj_) std::sort(row.begin(), row.end(), by_index);
    for (auto& row : graph->protein_adj_) std::sort(row.begin(), row.end(), by_index);

    uint64_t h = kFnvOffset;
    h = fnv1a_u64(graph->n_drugs(), h);
    h = fnv1a_u64(graph->n_proteins(), h);
    for (uint32_t d = 0; d < graph->n_drugs(); ++d) {
        h = fnv1a_u64(graph->drug_adj_[d].size(), h);
        for (const AdjEntry& e : graph->drug_adj_[d]) {
            h = fnv1a_u64(e.to, h);
            uint64_t bits;
            std::memcpy(&bits, &e.weight, sizeof bits);
            h = fnv1a_u64(bits, h);
        }
    }
    graph->fingerprint_ = h;
    return graph;
}

void BipartiteGraph::check_node(NodeRef node) const {
    if (node.index >= side_count(node.side)) {
        std::ostringstream msg;
        msg << (node.side == Side::Drug ? "drug" : "protein") << " index " << node.index
            << " out of range (side has " << side_count(node.side) << " nodes)";
        raise(Errc::invalid_node, msg.str());
    }
}

std::span<const AdjEntry> BipartiteGraph::adjacency(NodeRef node) const {
    check_node(node);
    const auto& rows = node.side == Side::Drug ? drug_adj_ : protein_adj_;
    return rows[node.index];
}

std::vector<uint32_t> BipartiteGraph::neighbors(NodeRef node) const {
    auto row = adjacency(node);
    std::vector<uint32_t> out;
    out.reserve(row.size());
    for (const AdjEntry& e : row) out.push_back(e.to);
    return out;
}

std::vector<uint32_t> BipartiteGraph::second_neighborhood(NodeRef node) const {
    auto row = adjacency(node);
    std::vector<uint32_t> out;
    for (const AdjEntry& step : row) {
        NodeRef mid{node.side == Side::Drug ? Side::Protein : Side::Drug, step.to};
        for (const AdjEntry& e : adjacency(mid)) out.push_back(e.to);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

uint32_t BipartiteGraph::degree(NodeRef node) const {
    return static_cast<uint32_t>(adjacency(node).size());
}

double BipartiteGraph::weighted_degree(NodeRef node) const {
    double total = 0.0;
    for (const AdjEntry& e : adjacency(node)) total += e.weight;
    return total;
}

bool BipartiteGraph::has_edge(uint32_t drug, uint32_t protein) const {
    return weight(drug, protein) > 0.0;
}

double BipartiteGraph::weight(uint32_t drug, uint32_t protein) const {
    check_node(drug_node(drug));
    check_node(protein_node(protein));
    const auto& row = drug_adj_[drug];
    auto it = std::lower_bound(row.begin(), row.end(), protein,
                               [](const AdjEntry& e, uint32_t p) { return e.to < p; });
    if (it == row.end() || it->to != protein) return 0.0;
    return it->weight;
}

void BipartiteGraph::validate() const {
    uint64_t forward = 0;
    for (uint32_t d = 0; d < n_drugs(); ++d) {
        uint32_t prev = std::numeric_limits<uint32_t>::max();
        for (const AdjEntry& e : drug_adj_[d]) {
            if (e.to >= n_proteins() || !(e.weight > 0.0)) {
                raise(Errc::invalid_node, "corrupt drug adjacency row");
            }
            if (prev != std::numeric_limits<uint32_t>::max() && e.to <= prev) {
                raise(Errc::invalid_node, "drug adjacency row not strictly sorted");
            }
            prev = e.to;
            ++forward;
            // transpose entry must exist with the identical weight
            const auto& col = protein_adj_[e.to];
            auto it = std::lower_bound(col.begin(), col.end(), d,
                                       [](const AdjEntry& x, uint32_t v) { return x.to < v; });
            if (it == col.end() || it->to != d || it->weight != e.weight) {
                raise(Errc::invalid_node, "drug/protein adjacency lists disagree");
            }
        }
    }
    uint64_t backward = 0;
    for (const auto& row : protein_adj_) backward += row.size();
    if (forward != backward || forward != edge_count_) {
        raise(Errc::invalid_node, "edge count mismatch between representations");
    }
}

UnifiedAdjacency UnifiedAdjacency::from_graph(const BipartiteGraph& graph) {
    UnifiedAdjacency a;
    a.n_drugs_ = graph.n_drugs();
    a.dim_ = graph.n_drugs() + graph.n_proteins();
    a.row_ptr_.reserve(a.dim_ + 1);
    a.col_.reserve(graph.edge_count() * 2);
    a.val_.reserve(graph.edge_count() * 2);

    a.row_ptr_.push_back(0);
    for (uint32_t d = 0; d < graph.n_drugs(); ++d) {
        for (const AdjEntry& e : graph.adjacency(drug_node(d))) {
            a.col_.push_back(a.n_drugs_ + e.to);
            a.val_.push_back(e.weight);
        }
        a.row_ptr_.push_back(a.col_.size());
    }
    for (uint32_t p = 0; p < graph.n_proteins(); ++p) {
        for (const AdjEntry& e : graph.adjacency(protein_node(p))) {
            a.col_.push_back(e.to);
            a.val_.push_back(e.weight);
        }
        a.row_ptr_.push_back(a.col_.size());
    }
    return a;
}

double UnifiedAdjacency::entry(uint32_t row, uint32_t col) const {
    if (row >= dim_ || col >= dim_) {
        raise(Errc::invalid_node, "unified adjacency index out of range");
    }
    auto begin = col_.begin() + static_cast<ptrdiff_t>(row_ptr_[row]);
    auto end = col_.begin() + static_cast<ptrdiff_t>(row_ptr_[row + 1]);
    auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return val_[static_cast<size_t>(it - col_.begin())];
}

void UnifiedAdjacency::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim_ || y.size() != dim_) {
        raise(Errc::invalid_argument, "apply: vector size does not match adjacency dimension");
    }
    for (uint32_t row = 0; row < dim_; ++row) {
        double acc = 0.0;
        for (size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) {
            acc += val_[k] * x[col_[k]];
        }
        y[row] = acc;
    }
}

double spectral_radius(const UnifiedAdjacency& adjacency, const SpectralOptions& options) {
    if (options.tol <= 0.0) raise(Errc::invalid_argument, "spectral tolerance must be > 0");
    const uint32_t n = adjacency.dim();
    if (n == 0 || adjacency.nnz() == 0) return 0.0;

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> ax(n), a2x(n);

    double estimate = 0.0;
    double previous = -1.0;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        adjacency.apply(x, ax);
        double norm_ax = 0.0;
        for (double v : ax) norm_ax += v * v;
        norm_ax = std::sqrt(norm_ax);
        if (norm_ax == 0.0) return 0.0;  // x fell entirely into the null space

        estimate = norm_ax;  // ||Ax|| with ||x|| = 1 is sqrt(x^T A^2 x)
        adjacency.apply(ax, a2x);
        double norm_a2x = 0.0;
        for (double v : a2x) norm_a2x += v * v;
        norm_a2x = std::sqrt(norm_a2x);
        if (norm_a2x == 0.0) return estimate;
        for (uint32_t i = 0; i < n; ++i) x[i] = a2x[i] / norm_a2x;

        if (previous >= 0.0 && std::abs(estimate - previous) <= options.tol * estimate) {
            return estimate;
        }
        previous = estimate;
    }
    std::ostringstream msg;
    msg << "power iteration did not converge within " << options.max_iterations
        << " iterations; best estimate " << estimate;
    raise(Errc::spectral_estimate_failed, msg.str());
}

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::ok: return "ok";
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::empty_dataset: return "empty_dataset";
        case Errc::invalid_weight: return "invalid_weight";
        case Errc::invalid_node: return "invalid_node";
        case Errc::observed_pair: return "observed_pair";
        case Errc::beta_too_large: return "beta_too_large";
        case Errc::solve_failed: return "solve_failed";
        case Errc::spectral_estimate_failed: return "spectral_estimate_failed";
        case Errc::empty_scores: return "empty_scores";
        case Errc::too_many_folds: return "too_many_folds";
        case Errc::leakage_detected: return "leakage_detected";
        case Errc::no_curves: return "no_curves";
        case Errc::schema_error: return "schema_error";
        case Errc::parse_error: return "parse_error";
        case Errc::io_error: return "io_error";
    }
    return "unknown";
}

}  // namespace dtilink
