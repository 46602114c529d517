#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcorr/core_stats.hpp"
#include "dcorr/dataset.hpp"

namespace dcorr {

namespace flags {
inline constexpr std::string_view nonlinear_candidate = "nonlinear-candidate";
inline constexpr std::string_view low_dcor_outlier = "low-dcor-outlier";
inline constexpr std::string_view constant_variable = "constant-variable";
inline constexpr std::string_view insufficient_data = "insufficient-data";
} // namespace flags

/// A screened variable: one column, or several columns forming a vector.
struct VariableBlock {
    std::string name;
    std::vector<std::string> columns;
};

struct ScreenConfig {
    /// Columns screened pairwise as scalars; empty means every dataset column.
    std::vector<std::string> columns;
    /// When non-empty, screen these vector blocks instead of single columns.
    std::vector<VariableBlock> blocks;
    bool p_values = false;
    std::size_t replicates = 199;
    std::uint64_t seed = 0;
    std::size_t min_group_rows = 3;
    ComputeOptions compute;
    std::string dataset_id;
};

struct CorrelationRecord {
    std::string group;
    std::string var_a; // var_a < var_b lexicographically
    std::string var_b;
    std::size_t n = 0;
    std::optional<double> pearson; // scalar pairs with non-constant data only
    std::optional<double> dcor;
    std::optional<double> p_value;
    std::vector<std::string> flags;

    bool has_flag(std::string_view f) const;
};

struct CorrelationTable {
    std::vector<CorrelationRecord> records;
    std::string dataset_id;
    std::uint64_t seed = 0;
    std::size_t replicates = 0; // 0 when p-values were not requested
    std::string timestamp;      // UTC, ISO-8601; informational, never emitted to plot files
    std::vector<std::string> skipped_groups;
    std::vector<std::string> warnings;
};

/// Pearson and distance correlation for every unordered variable pair in
/// every group. Groups with fewer than min_group_rows rows are skipped with
/// a warning. Optional permutation p-values use a seed derived from
/// (config.seed, group, var_a, var_b), so they do not depend on how the
/// dataset was split.
CorrelationTable pairwise_screen(const Dataset& d, const ScreenConfig& config);

/// Heuristic outlier rule. Defaults are conventions, not derived values.
struct OutlierRule {
    double nonlinear_threshold = 0.25; // dcor - |pearson| >= threshold
    double percentile = 5.0;           // low-dcor cutoff within a group
    std::size_t min_group_records = 20;
};

/// Re-derives the nonlinear-candidate and low-dcor-outlier flags; other
/// flags and the record order are preserved. Throws DataError on an empty table.
CorrelationTable flag_outliers(CorrelationTable t, const OutlierRule& rule = {});

enum class PlotFormat { csv, json };

PlotFormat parse_plot_format(std::string_view name);

/// Serializes the records sorted by (group, var_a, var_b). Fields:
/// group, var_a, var_b, n, pearson, dcor, p_value, flags.
std::string render_plot_data(const CorrelationTable& t, PlotFormat format);

/// render_plot_data written atomically to path.
void emit_plot_data(const CorrelationTable& t, PlotFormat format, const std::filesystem::path& path);

/// Linear-interpolation percentile (q in [0, 100]) of unsorted values.
double percentile(std::vector<double> values, double q);

} // namespace dcorr
