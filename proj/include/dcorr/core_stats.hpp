#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "dcorr/sample.hpp"

namespace dcorr {

enum class Strategy {
    automatic,    // materialized when it fits the memory budget, else streaming
    materialized, // two N x N centred matrices
    streaming,    // two passes, O(N + d) memory
};

struct ComputeOptions {
    Strategy strategy = Strategy::automatic;
    std::size_t memory_budget_bytes = std::size_t{1} << 30;
    /// Rows per block in the streaming passes. Fixes the reduction order,
    /// so results are independent of the thread count.
    std::size_t block_rows = 256;
    unsigned threads = 0; // 0: hardware concurrency
};

/// Distance statistics of one (X, Y) pair. dvar_x and dvar_y are the
/// distance variances V_N(X, X) and V_N(Y, Y), i.e. square roots of the
/// corresponding dcov_sq values.
struct PairStats {
    double dcov_sq = 0.0;
    double dvar_x = 0.0;
    double dvar_y = 0.0;
    double dcor = 0.0;
    std::optional<double> pearson; // set only for scalar pairs with non-constant data
    std::size_t n = 0;
};

DistanceMatrix pairwise_distances(const Sample& x);

CenteredMatrix double_center(const DistanceMatrix& d);

/// Empirical squared distance covariance (1/N^2) sum_kl A_kl B_kl via the
/// materialized centred matrices. Throws DimensionError if x.n() != y.n().
double dcov_sq(const Sample& x, const Sample& y);

/// Same quantity without materializing any N x N matrix.
double dcov_sq_streaming(const Sample& x, const Sample& y, const ComputeOptions& opts = {});

/// Dispatches on opts.strategy.
double dcov_sq(const Sample& x, const Sample& y, const ComputeOptions& opts);

/// Bytes held by the materialized path for N observations (two N x N matrices).
std::size_t materialized_bytes(std::size_t n) noexcept;

Strategy resolve_strategy(std::size_t n, const ComputeOptions& opts) noexcept;

/// (1/N^2) sum_kl A_kl B_{perm[k] perm[l]}. Double centring commutes with
/// relabelling, so this is dcov_sq(x, y.permuted(perm)) without recentring.
double dcov_sq_centered(const CenteredMatrix& a, const CenteredMatrix& b,
                        std::span<const std::size_t> perm);
double dcov_sq_centered(const CenteredMatrix& a, const CenteredMatrix& b);

PairStats dcor(const Sample& x, const Sample& y, const ComputeOptions& opts = {});

/// Empirical Pearson correlation. Throws DegenerateVarianceError when
/// either input is constant and DimensionError on length mismatch or N < 2.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(const Sample& x, const Sample& y);

} // namespace dcorr
