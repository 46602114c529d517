#include "dcorr/sample.hpp"

#include <cmath>
#include <string>

#include "dcorr/error.hpp"

namespace dcorr {

Sample::Sample(std::size_t n, std::size_t dim, std::vector<double> data)
    : n_(n), dim_(dim), data_(std::move(data))
{
    validate();
}

Sample::Sample(std::initializer_list<std::initializer_list<double>> rows)
{
    n_ = rows.size();
    dim_ = n_ ? rows.begin()->size() : 0;
    data_.reserve(n_ * dim_);
    for (const auto& r : rows) {
        if (r.size() != dim_)
            throw DimensionError("ragged sample literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    validate();
}

Sample Sample::from_rows(const std::vector<std::vector<double>>& rows)
{
    const std::size_t n = rows.size();
    const std::size_t dim = n ? rows.front().size() : 0;
    std::vector<double> data;
    data.reserve(n * dim);
    for (std::size_t k = 0; k < n; ++k) {
        if (rows[k].size() != dim)
            throw DimensionError("row " + std::to_string(k) + " has " +
                                 std::to_string(rows[k].size()) + " columns, expected " +
                                 std::to_string(dim));
        data.insert(data.end(), rows[k].begin(), rows[k].end());
    }
    return Sample(n, dim, std::move(data));
}

Sample Sample::scalar(std::span<const double> values)
{
    return Sample(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Sample Sample::permuted(std::span<const std::size_t> perm) const
{
    if (perm.size() != n_)
        throw DimensionError("permutation length does not match sample size");
    std::vector<double> out;
    out.reserve(data_.size());
    for (std::size_t k = 0; k < n_; ++k) {
        const auto r = row(perm[k]);
        out.insert(out.end(), r.begin(), r.end());
    }
    return Sample(n_, dim_, std::move(out));
}

void Sample::validate() const
{
    if (n_ == 0 || dim_ == 0)
        throw DimensionError("sample must have at least one row and one column");
    if (data_.size() != n_ * dim_)
        throw DimensionError("sample buffer size does not match n * dim");
    for (std::size_t k = 0; k < n_; ++k)
        for (std::size_t j = 0; j < dim_; ++j)
            if (!std::isfinite(data_[k * dim_ + j]))
                throw DataError("non-finite value in row " + std::to_string(k) + ", column " +
                                std::to_string(j));
}

} // namespace dcorr
