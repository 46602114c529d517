#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcorr/sample.hpp"

namespace dcorr {

enum class MissingPolicy {
    reject,        // any missing cell in a selected column is a DataError
    drop_row,      // rows with a missing selected cell are removed
    pairwise_drop, // keep missing cells; screening uses per-pair complete cases
};

MissingPolicy parse_missing_policy(std::string_view name);
std::string_view to_string(MissingPolicy p) noexcept;

struct LoadOptions {
    char delimiter = ',';
    std::optional<std::string> group_column;
    /// Numeric columns to load; empty selects every column except the group column.
    std::vector<std::string> columns;
    MissingPolicy missing = MissingPolicy::reject;
};

/// A named numeric variable. Missing cells are NaN (only under pairwise_drop).
struct Column {
    std::string name;
    std::vector<double> values;
};

struct Dataset {
    std::string source;
    std::vector<Column> columns;
    std::size_t row_count = 0;
    std::optional<std::string> group_column;
    std::vector<std::string> group_labels; // one per row when grouped, else empty
    std::size_t dropped_rows = 0;

    const Column& column(std::string_view name) const;
    /// Distinct group labels in lexicographic order; {"all"} when ungrouped.
    std::vector<std::string> groups() const;
    /// Row indices belonging to `group` ("all" selects every row when ungrouped).
    std::vector<std::size_t> rows_in(std::string_view group) const;
};

/// Splits delimiter-separated text into records. Double-quoted fields may
/// contain delimiters, newlines and "" escapes. CRLF line ends accepted.
std::vector<std::vector<std::string>> parse_dsv(std::string_view text, char delimiter);

Dataset parse_dataset(std::string_view text, const LoadOptions& opts, std::string source = "<memory>");
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& opts);

/// Reads a sample file: header row, every column numeric, no missing cells.
/// Columns become the vector coordinates.
Sample load_sample(const std::filesystem::path& path, char delimiter = ',');

} // namespace dcorr
