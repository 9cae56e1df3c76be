#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "core/indices.hpp"
#include "core/parallel.hpp"

namespace dtilink {

namespace {

/// Dense solve of (I - beta*A) X = beta*A restricted to the protein columns;
/// X's drug rows are exactly the drug x protein block of (I - beta*A)^-1 - I.
/// The beta bound keeps (I - beta*A) symmetric positive definite, so a
/// Cholesky factorisation applies.
void katz_direct(const UnifiedAdjacency& adjacency, double beta, uint32_t n_drugs,
                 uint32_t n_proteins, ScoreTable& table) {
    const auto dim = static_cast<Eigen::Index>(adjacency.dim());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(dim, dim);
    auto row_ptr = adjacency.row_ptr();
    auto col = adjacency.col();
    auto val = adjacency.val();
    for (uint32_t i = 0; i < adjacency.dim(); ++i) {
        for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            system(i, col[k]) -= beta * val[k];
        }
    }

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dim, n_proteins);
    for (uint32_t i = 0; i < adjacency.dim(); ++i) {
        for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (col[k] >= n_drugs) rhs(i, col[k] - n_drugs) = beta * val[k];
        }
    }

    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(system);  // factors in place
    if (llt.info() != Eigen::Success) {
        raise(Errc::solve_failed, "cholesky factorisation of (I - beta*A) failed");
    }
    Eigen::MatrixXd solution = llt.solve(rhs);
    if (!solution.allFinite()) {
        raise(Errc::solve_failed, "katz direct solve produced non-finite scores");
    }

    for (uint32_t d = 0; d < n_drugs; ++d) {
        double* row = table.row(d);
        for (uint32_t p = 0; p < n_proteins; ++p) {
            row[p] = solution(d, p);
        }
    }
}

/// Accumulates sum_k beta^k A^k restricted to the protein columns; the k-th
/// term is obtained from the previous one by a sparse multiply, so only two
/// dim x n_proteins panels are live at a time.
void katz_series(const UnifiedAdjacency& adjacency, double beta, double series_tol,
                 int series_max_terms, uint32_t n_drugs, uint32_t n_proteins,
                 ScoreTable& table, int threads) {
    const uint32_t dim = adjacency.dim();
    const size_t width = n_proteins;
    std::vector<double> term(static_cast<size_t>(dim) * width, 0.0);
    std::vector<double> next(term.size(), 0.0);
    std::vector<double> sum(term.size(), 0.0);

    auto row_ptr = adjacency.row_ptr();
    auto col = adjacency.col();
    auto val = adjacency.val();

    // term = beta * A restricted to protein columns
    for (uint32_t i = 0; i < dim; ++i) {
        for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (col[k] >= n_drugs) {
                term[static_cast<size_t>(i) * width + (col[k] - n_drugs)] = beta * val[k];
            }
        }
    }
    for (size_t i = 0; i < term.size(); ++i) sum[i] = term[i];

    for (int produced = 1; produced < series_max_terms; ++produced) {
        std::vector<double> chunk_max(static_cast<size_t>(resolve_threads(threads)), 0.0);
        std::atomic<size_t> chunk_id{0};
        parallel_chunks(dim, threads, [&](size_t begin, size_t end) {
            size_t my_chunk = chunk_id.fetch_add(1);
            double local_max = 0.0;
            for (size_t i = begin; i < end; ++i) {
                double* out = next.data() + i * width;
                std::fill(out, out + width, 0.0);
                for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                    const double scale = beta * val[k];
                    const double* in = term.data() + static_cast<size_t>(col[k]) * width;
                    for (size_t j = 0; j < width; ++j) out[j] += scale * in[j];
                }
                for (size_t j = 0; j < width; ++j) {
                    sum[i * width + j] += out[j];
                    local_max = std::max(local_max, std::abs(out[j]));
                }
            }
            if (my_chunk < chunk_max.size()) chunk_max[my_chunk] = local_max;
        });
        term.swap(next);
        double term_max = 0.0;
        for (double v : chunk_max) term_max = std::max(term_max, v);
        if (term_max < series_tol) break;
    }

    for (uint32_t d = 0; d < n_drugs; ++d) {
        double* row = table.row(d);
        const double* src = sum.data() + static_cast<size_t>(d) * width;
        for (uint32_t p = 0; p < n_proteins; ++p) row[p] = src[p];
    }
}

}  // namespace

ScoreTable katz_scores(std::shared_ptr<const BipartiteGraph> graph, double beta,
                       KatzMethod method, double series_tol, int series_max_terms,
                       int threads) {
    IndexConfig config;
    config.kind = IndexKind::Katz;
    config.weighted = graph->weighted();
    config.beta = beta;
    config.katz_method = method;
    config.series_tol = series_tol;
    config.series_max_terms = series_max_terms;
    config.validate();

    UnifiedAdjacency adjacency = UnifiedAdjacency::from_graph(*graph);
    const double lambda = spectral_radius(adjacency);
    if (lambda > 0.0) {
        const double limit = kKatzBetaMargin / lambda;
        if (beta >= limit) {
            std::ostringstream msg;
            msg << "beta " << beta << " violates the convergence bound: it must stay below "
                << kKatzBetaMargin << "/lambda_max = " << limit
                << " (1/lambda_max = " << 1.0 / lambda << ")";
            raise(Errc::beta_too_large, msg.str());
        }
    }

    KatzMethod resolved = method;
    if (resolved == KatzMethod::Auto) {
        resolved = adjacency.dim() <= kKatzDirectSolveLimit ? KatzMethod::DirectSolve
                                                            : KatzMethod::TruncatedSeries;
    }
    config.katz_method = resolved;

    ScoreTable table(graph, config);
    if (resolved == KatzMethod::DirectSolve) {
        katz_direct(adjacency, beta, graph->n_drugs(), graph->n_proteins(), table);
    } else {
        katz_series(adjacency, beta, series_tol, series_max_terms, graph->n_drugs(),
                    graph->n_proteins(), table, threads);
    }
    table.clear_observed_slots();
    return table;
}

}  // namespace dtilink
