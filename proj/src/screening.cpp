#include "dcorr/screening.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <map>
#include <tuple>

#include <json.hpp>

#include "dcorr/error.hpp"
#include "dcorr/inference.hpp"
#include "dcorr/io.hpp"
#include "dcorr/parallel.hpp"

namespace dcorr {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t pair_seed(std::uint64_t seed, const std::string& group, const std::string& a,
                        const std::string& b)
{
    std::uint64_t h = fnv1a(group);
    h = fnv1a("\x1f", h);
    h = fnv1a(a, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(b, h);
    return derive_seed(seed, h);
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ResolvedVariable {
    std::string name;
    std::vector<const Column*> columns;
};

std::vector<ResolvedVariable> resolve_variables(const Dataset& d, const ScreenConfig& config)
{
    std::vector<ResolvedVariable> vars;
    if (!config.blocks.empty()) {
        for (const auto& b : config.blocks) {
            if (b.columns.empty())
                throw DomainError("variable block '" + b.name + "' has no columns");
            ResolvedVariable v{b.name, {}};
            for (const auto& c : b.columns)
                v.columns.push_back(&d.column(c));
            vars.push_back(std::move(v));
        }
    } else if (!config.columns.empty()) {
        for (const auto& c : config.columns)
            vars.push_back({c, {&d.column(c)}});
    } else {
        for (const auto& c : d.columns)
            vars.push_back({c.name, {&c}});
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i].name == vars[j].name)
                throw DomainError("variable '" + vars[i].name + "' selected twice");
    return vars;
}

bool complete(const ResolvedVariable& v, std::size_t row)
{
    return std::none_of(v.columns.begin(), v.columns.end(),
                        [row](const Column* c) { return std::isnan(c->values[row]); });
}

Sample gather(const ResolvedVariable& v, const std::vector<std::size_t>& rows)
{
    const std::size_t dim = v.columns.size();
    std::vector<double> data(rows.size() * dim);
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t j = 0; j < dim; ++j)
            data[k * dim + j] = v.columns[j]->values[rows[k]];
    return Sample(rows.size(), dim, std::move(data));
}

struct PairJob {
    std::size_t group;
    std::size_t a;
    std::size_t b;
};

} // namespace

bool CorrelationRecord::has_flag(std::string_view f) const
{
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

CorrelationTable pairwise_screen(const Dataset& d, const ScreenConfig& config)
{
    const auto vars = resolve_variables(d, config);
    if (vars.size() < 2)
        throw DomainError("screening needs at least 2 variables, got " + std::to_string(vars.size()));
    if (config.p_values && config.replicates < 1)
        throw DomainError("p-values need at least 1 replicate");

    CorrelationTable table;
    table.dataset_id = config.dataset_id.empty() ? d.source : config.dataset_id;
    table.seed = config.seed;
    table.replicates = config.p_values ? config.replicates : 0;
    table.timestamp = utc_timestamp();

    const std::size_t min_rows = std::max<std::size_t>(config.min_group_rows, 2);
    std::vector<std::string> groups;
    std::vector<std::vector<std::size_t>> group_rows;
    for (const auto& g : d.groups()) {
        auto rows = d.rows_in(g);
        if (rows.size() < min_rows) {
            table.skipped_groups.push_back(g);
            table.warnings.push_back("group '" + g + "' skipped: " + std::to_string(rows.size()) +
                                     " rows, need " + std::to_string(min_rows));
            continue;
        }
        groups.push_back(g);
        group_rows.push_back(std::move(rows));
    }
    if (groups.empty())
        throw DataError(d.source + ": every group has fewer than " + std::to_string(min_rows) + " rows");

    std::vector<PairJob> jobs;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (std::size_t j = i + 1; j < vars.size(); ++j)
                jobs.push_back({g, i, j});

    ComputeOptions inner = config.compute;
    inner.threads = 1;
    table.records.resize(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    for_each_block(jobs.size(), config.compute.threads, [&](std::size_t idx) {
        try {
            const PairJob& job = jobs[idx];
            const auto& va = vars[job.a];
            const auto& vb = vars[job.b];
            CorrelationRecord& rec = table.records[idx];
            rec.group = groups[job.group];
            const bool swap = vb.name < va.name;
            rec.var_a = swap ? vb.name : va.name;
            rec.var_b = swap ? va.name : vb.name;

            std::vector<std::size_t> rows;
            for (auto r : group_rows[job.group])
                if (complete(va, r) && complete(vb, r))
                    rows.push_back(r);
            rec.n = rows.size();
            if (rows.size() < min_rows) {
                rec.flags.emplace_back(flags::insufficient_data);
                return;
            }
            // Canonical orientation, so swapping the selection order is a no-op.
            const Sample sa = gather(swap ? vb : va, rows);
            const Sample sb = gather(swap ? va : vb, rows);
            const PairStats st = dcor(sa, sb, inner);
            rec.dcor = st.dcor;
            rec.pearson = st.pearson;
            if (st.dvar_x == 0.0 || st.dvar_y == 0.0)
                rec.flags.emplace_back(flags::constant_variable);
            if (config.p_values)
                rec.p_value = permutation_test(sa, sb, config.replicates,
                                               pair_seed(config.seed, rec.group, rec.var_a, rec.var_b),
                                               inner)
                                  .p_value;
        } catch (...) {
            failures[idx] = std::current_exception();
        }
    });
    for (const auto& f : failures)
        if (f)
            std::rethrow_exception(f);
    return table;
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty())
        throw DomainError("percentile of an empty set");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CorrelationTable flag_outliers(CorrelationTable t, const OutlierRule& rule)
{
    if (t.records.empty())
        throw DataError("cannot flag outliers in an empty table");

    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        auto& rec = t.records[i];
        std::erase_if(rec.flags, [](const std::string& f) {
            return f == flags::nonlinear_candidate || f == flags::low_dcor_outlier;
        });
        if (rec.dcor && rec.pearson)
            by_group[rec.group].push_back(i);
    }

    for (auto& rec : t.records)
        if (rec.dcor && rec.pearson && *rec.dcor - std::abs(*rec.pearson) >= rule.nonlinear_threshold)
            rec.flags.emplace_back(flags::nonlinear_candidate);

    for (const auto& [group, idx] : by_group) {
        if (idx.size() < rule.min_group_records)
            continue;
        std::vector<double> dcors, abs_pearson;
        for (auto i : idx) {
            dcors.push_back(*t.records[i].dcor);
            abs_pearson.push_back(std::abs(*t.records[i].pearson));
        }
        const double cut = percentile(dcors, rule.percentile);
        const double median = percentile(abs_pearson, 50.0);
        for (auto i : idx) {
            auto& rec = t.records[i];
            if (*rec.dcor < cut && std::abs(*rec.pearson) > median)
                rec.flags.emplace_back(flags::low_dcor_outlier);
        }
    }
    return t;
}

PlotFormat parse_plot_format(std::string_view name)
{
    if (name == "csv")
        return PlotFormat::csv;
    if (name == "json")
        return PlotFormat::json;
    throw DomainError("unknown output format '" + std::string(name) + "' (known: csv, json)");
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_flags(const std::vector<std::string>& f)
{
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i)
            out += ';';
        out += f[i];
    }
    return out;
}

} // namespace

std::string render_plot_data(const CorrelationTable& t, PlotFormat format)
{
    std::vector<const CorrelationRecord*> sorted;
    sorted.reserve(t.records.size());
    for (const auto& r : t.records)
        sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return std::tie(a->group, a->var_a, a->var_b) < std::tie(b->group, b->var_a, b->var_b);
    });

    if (format == PlotFormat::csv) {
        const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : ""; };
        std::string out = "group,var_a,var_b,n,pearson,dcor,p_value,flags\n";
        for (const auto* r : sorted) {
            out += csv_field(r->group) + ',' + csv_field(r->var_a) + ',' + csv_field(r->var_b) + ',' +
                   std::to_string(r->n) + ',' + opt(r->pearson) + ',' + opt(r->dcor) + ',' +
                   opt(r->p_value) + ',' + csv_field(join_flags(r->flags)) + '\n';
        }
        return out;
    }

    using nlohmann::ordered_json;
    const auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
    ordered_json arr = ordered_json::array();
    for (const auto* r : sorted) {
        ordered_json o;
        o["group"] = r->group;
        o["var_a"] = r->var_a;
        o["var_b"] = r->var_b;
        o["n"] = r->n;
        o["pearson"] = opt(r->pearson);
        o["dcor"] = opt(r->dcor);
        o["p_value"] = opt(r->p_value);
        o["flags"] = r->flags;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

void emit_plot_data(const CorrelationTable& t, PlotFormat format, const std::filesystem::path& path)
{
    write_file_atomic(path, render_plot_data(t, format));
}

} // namespace dcorr
