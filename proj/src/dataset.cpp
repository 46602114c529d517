#include "dcorr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include "dcorr/error.hpp"
#include "dcorr/io.hpp"

namespace dcorr {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::string cell_ref(const std::string& source, std::size_t row, const std::string& column)
{
    return source + ": row " + std::to_string(row) + ", column '" + column + "'";
}

// Empty cell -> nullopt. Throws DataError for anything that is not a finite number.
std::optional<double> parse_cell(std::string_view raw, const std::string& where)
{
    const auto s = trim(raw);
    if (s.empty())
        return std::nullopt;
    double v = 0.0;
    const char* begin = s.data();
    if (*begin == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError(where + ": '" + std::string(s) + "' is not a number");
    if (!std::isfinite(v))
        throw DataError(where + ": non-finite value '" + std::string(s) + "'");
    return v;
}

} // namespace

MissingPolicy parse_missing_policy(std::string_view name)
{
    if (name == "reject")
        return MissingPolicy::reject;
    if (name == "drop-row")
        return MissingPolicy::drop_row;
    if (name == "pairwise-drop")
        return MissingPolicy::pairwise_drop;
    throw DomainError("unknown missing-value policy '" + std::string(name) +
                      "' (known: reject, drop-row, pairwise-drop)");
}

std::string_view to_string(MissingPolicy p) noexcept
{
    switch (p) {
    case MissingPolicy::reject:
        return "reject";
    case MissingPolicy::drop_row:
        return "drop-row";
    case MissingPolicy::pairwise_drop:
        return "pairwise-drop";
    }
    return "unknown";
}

const Column& Dataset::column(std::string_view name) const
{
    for (const auto& c : columns)
        if (c.name == name)
            return c;
    throw DataError(source + ": no column named '" + std::string(name) + "'");
}

std::vector<std::string> Dataset::groups() const
{
    if (!group_column)
        return {"all"};
    const std::set<std::string> distinct(group_labels.begin(), group_labels.end());
    return {distinct.begin(), distinct.end()};
}

std::vector<std::size_t> Dataset::rows_in(std::string_view group) const
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < row_count; ++i)
        if (!group_column ? group == "all" : group_labels[i] == group)
            rows.push_back(i);
    return rows;
}

std::vector<std::vector<std::string>> parse_dsv(std::string_view text, char delimiter)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    const auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    const auto end_record = [&] {
        end_field();
        // A bare empty line is not a record.
        if (!(record.size() == 1 && record.front().empty()))
            records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n')
                continue;
            end_record();
        } else {
            field.push_back(c);
            if (c != ' ' && c != '\t')
                field_started = true;
        }
    }
    if (in_quotes)
        throw DataError("unterminated quoted field at end of input");
    if (!field.empty() || !record.empty())
        end_record();
    return records;
}

Dataset parse_dataset(std::string_view text, const LoadOptions& opts, std::string source)
{
    auto records = parse_dsv(text, opts.delimiter);
    if (records.empty())
        throw DataError(source + ": missing header row");
    const auto& header = records.front();
    {
        std::unordered_set<std::string> seen;
        for (const auto& h : header)
            if (!seen.insert(h).second)
                throw DataError(source + ": duplicate column name '" + h + "'");
    }
    const auto index_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DataError(source + ": no column named '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    std::optional<std::size_t> group_idx;
    if (opts.group_column)
        group_idx = index_of(*opts.group_column);

    std::vector<std::size_t> selected;
    if (opts.columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (i != group_idx)
                selected.push_back(i);
    } else {
        for (const auto& name : opts.columns) {
            const auto idx = index_of(name);
            if (idx == group_idx)
                throw DataError(source + ": column '" + name + "' is the group column");
            selected.push_back(idx);
        }
    }

    Dataset ds;
    ds.source = std::move(source);
    ds.group_column = opts.group_column;
    for (auto idx : selected)
        ds.columns.push_back({header[idx], {}});

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> row_values(selected.size());
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size())
            throw DataError(ds.source + ": row " + std::to_string(r) + " has " +
                            std::to_string(rec.size()) + " fields, header has " +
                            std::to_string(header.size()));
        bool missing = false;
        for (std::size_t c = 0; c < selected.size(); ++c) {
            const auto& name = header[selected[c]];
            const auto v = parse_cell(rec[selected[c]], cell_ref(ds.source, r, name));
            if (!v) {
                if (opts.missing == MissingPolicy::reject)
                    throw DataError(cell_ref(ds.source, r, name) + ": missing value");
                missing = true;
            }
            row_values[c] = v.value_or(nan);
        }
        std::string label;
        if (group_idx) {
            label = std::string(trim(rec[*group_idx]));
            if (label.empty()) {
                if (opts.missing == MissingPolicy::reject)
                    throw DataError(cell_ref(ds.source, r, header[*group_idx]) + ": missing group label");
                // A row without a group cannot be assigned under any policy.
                ++ds.dropped_rows;
                continue;
            }
        }
        if (missing && opts.missing == MissingPolicy::drop_row) {
            ++ds.dropped_rows;
            continue;
        }
        for (std::size_t c = 0; c < selected.size(); ++c)
            ds.columns[c].values.push_back(row_values[c]);
        if (group_idx)
            ds.group_labels.push_back(std::move(label));
        ++ds.row_count;
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& opts)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw DataError(e.what());
    }
    return parse_dataset(text, opts, path.string());
}

Sample load_sample(const std::filesystem::path& path, char delimiter)
{
    LoadOptions opts;
    opts.delimiter = delimiter;
    const Dataset ds = load_dataset(path, opts);
    if (ds.row_count == 0)
        throw DataError(path.string() + ": no data rows");
    const std::size_t dim = ds.columns.size();
    std::vector<double> data(ds.row_count * dim);
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t k = 0; k < ds.row_count; ++k)
            data[k * dim + j] = ds.columns[j].values[k];
    return Sample(ds.row_count, dim, std::move(data));
}

} // namespace dcorr
