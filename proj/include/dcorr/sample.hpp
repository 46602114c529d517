#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dcorr {

/// N observations of a d-dimensional real vector, stored row-major.
/// Construction rejects empty shapes and non-finite entries, so every
/// Sample in circulation satisfies the finiteness invariant.
class Sample {
public:
    Sample(std::size_t n, std::size_t dim, std::vector<double> data);

    /// Convenience for tests and small literals: {{x11, x12}, {x21, x22}}.
    Sample(std::initializer_list<std::initializer_list<double>> rows);

    static Sample from_rows(const std::vector<std::vector<double>>& rows);
    static Sample scalar(std::span<const double> values);

    std::size_t n() const noexcept { return n_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> row(std::size_t k) const noexcept
    {
        return {data_.data() + k * dim_, dim_};
    }
    double operator()(std::size_t k, std::size_t j) const noexcept
    {
        return data_[k * dim_ + j];
    }
    std::span<const double> data() const noexcept { return data_; }

    /// Rows reordered so that row k of the result is row perm[k] of this.
    Sample permuted(std::span<const std::size_t> perm) const;

private:
    void validate() const;

    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Dense symmetric N x N matrix of Euclidean distances a_kl = |X_k - X_l|.
class DistanceMatrix {
public:
    DistanceMatrix(std::size_t n, std::vector<double> entries)
        : n_(n), entries_(std::move(entries))
    {
    }

    std::size_t n() const noexcept { return n_; }
    double operator()(std::size_t k, std::size_t l) const noexcept
    {
        return entries_[k * n_ + l];
    }
    std::span<const double> entries() const noexcept { return entries_; }

private:
    std::size_t n_;
    std::vector<double> entries_;
};

/// Double-centred distance matrix A_kl = a_kl - a_k. - a_.l + a_..,
/// together with the means used to build it.
struct CenteredMatrix {
    std::size_t n = 0;
    std::vector<double> entries;
    std::vector<double> row_mean;
    std::vector<double> col_mean;
    double grand_mean = 0.0;

    double operator()(std::size_t k, std::size_t l) const noexcept
    {
        return entries[k * n + l];
    }
};

} // namespace dcorr
