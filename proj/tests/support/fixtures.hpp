#pragma once

// Shared generators for the unit and acceptance suites.

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dcorr/rng.hpp"
#include "dcorr/sample.hpp"

namespace fixtures {

inline double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline dcorr::Sample random_sample(dcorr::CounterRng& rng, std::size_t n, std::size_t dim)
{
    std::vector<double> v(n * dim);
    for (auto& e : v)
        e = rng.normal();
    return dcorr::Sample(n, dim, std::move(v));
}

/// A sample correlated with `x` through a nonlinear map plus noise, so
/// dependence statistics are not vanishingly small.
inline dcorr::Sample dependent_sample(dcorr::CounterRng& rng, const dcorr::Sample& x, std::size_t dim)
{
    std::vector<double> v(x.n() * dim);
    for (std::size_t k = 0; k < x.n(); ++k)
        for (std::size_t j = 0; j < dim; ++j)
            v[k * dim + j] = std::sin(x(k, j % x.dim())) + 0.5 * rng.normal();
    return dcorr::Sample(x.n(), dim, std::move(v));
}

/// Random orthogonal d x d matrix (row-major) by Gram-Schmidt on a Gaussian matrix.
inline std::vector<double> random_orthogonal(dcorr::CounterRng& rng, std::size_t d)
{
    std::vector<double> q(d * d);
    for (auto& e : q)
        e = rng.normal();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                dot += q[i * d + j] * q[k * d + j];
            for (std::size_t j = 0; j < d; ++j)
                q[i * d + j] -= dot * q[k * d + j];
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            norm += q[i * d + j] * q[i * d + j];
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < d; ++j)
            q[i * d + j] /= norm;
    }
    return q;
}

/// Rows of x multiplied on the right by the d x d matrix u.
inline dcorr::Sample transform(const dcorr::Sample& x, const std::vector<double>& u)
{
    const std::size_t d = x.dim();
    std::vector<double> v(x.n() * d, 0.0);
    for (std::size_t k = 0; k < x.n(); ++k)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i)
                v[k * d + j] += x(k, i) * u[i * d + j];
    return dcorr::Sample(x.n(), d, std::move(v));
}

inline dcorr::Sample affine(const dcorr::Sample& x, double scale, const std::vector<double>& shift)
{
    std::vector<double> v(x.data().begin(), x.data().end());
    for (std::size_t k = 0; k < x.n(); ++k)
        for (std::size_t j = 0; j < x.dim(); ++j)
            v[k * x.dim() + j] = scale * v[k * x.dim() + j] + shift[j];
    return dcorr::Sample(x.n(), x.dim(), std::move(v));
}

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("dcorr-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

/// Survey-shaped table: `columns` numeric variables v01..vK over `rows`
/// rows, with a `type` column cycling through `groups` labels when
/// groups > 1. Each variable mixes a shared latent factor with a
/// variable-specific transform so the pairs span linear, nonlinear and
/// unrelated associations.
inline std::string synthetic_table(std::size_t columns, std::size_t rows, std::size_t groups,
                                   std::uint64_t seed)
{
    dcorr::CounterRng rng(seed, 0);
    std::string out;
    if (groups > 1)
        out += "type,";
    for (std::size_t c = 0; c < columns; ++c) {
        char name[16];
        std::snprintf(name, sizeof name, "v%02zu", c + 1);
        out += name;
        out += c + 1 < columns ? "," : "\n";
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (groups > 1)
            out += "T" + std::to_string(r % groups + 1) + ",";
        const double latent = rng.normal();
        for (std::size_t c = 0; c < columns; ++c) {
            double v = 0.0;
            switch (c % 4) {
            case 0: v = latent + 0.5 * rng.normal(); break;
            case 1: v = latent * latent + 0.5 * rng.normal(); break;
            case 2: v = std::sin(2.0 * latent) + 0.3 * rng.normal(); break;
            default: v = rng.normal(); break;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            out += buf;
            out += c + 1 < columns ? "," : "\n";
        }
    }
    return out;
}

} // namespace fixtures
