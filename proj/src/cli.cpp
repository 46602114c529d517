#include "dcorr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcorr/core_stats.hpp"
#include "dcorr/dataset.hpp"
#include "dcorr/error.hpp"
#include "dcorr/inference.hpp"
#include "dcorr/oracle.hpp"
#include "dcorr/rng.hpp"
#include "dcorr/screening.hpp"
#include "dcorr/singular.hpp"

namespace dcorr::cli {

namespace {

using json = nlohmann::ordered_json;

// Acceptance thresholds shared with the verify subcommands.
constexpr double kAlgebraicTolerance = 1e-12;
constexpr double kSingularTolerance = 1e-4;

json header()
{
    json j;
    j["schema_version"] = schema_version;
    return j;
}

json nullable(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

double relative_difference(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

char parse_delimiter(const std::string& s)
{
    if (s == "\\t" || s == "tab")
        return '\t';
    if (s.size() != 1 || s == "\"" || s == "\n" || s == "\r")
        throw CLI::ValidationError("--delimiter", "must be a single character (or 'tab')");
    return s[0];
}

std::uint64_t fresh_seed()
{
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct SeedOption {
    std::uint64_t value = 0;
    CLI::Option* opt = nullptr;

    void attach(CLI::App* app)
    {
        opt = app->add_option("--seed", value, "Random seed (auto-generated and echoed if omitted)");
    }
    std::uint64_t resolve(std::ostream& err)
    {
        if (opt->count() == 0) {
            value = fresh_seed();
            err << "dcorr: generated seed " << value << "\n";
        }
        return value;
    }
};

struct ComputeFlags {
    std::string strategy = "auto";
    std::size_t memory_budget = std::size_t{1} << 30;
    unsigned threads = 0;

    void attach(CLI::App* app)
    {
        app->add_option("--strategy", strategy, "auto, materialized or streaming")
            ->check(CLI::IsMember({"auto", "materialized", "streaming"}))
            ->capture_default_str();
        app->add_option("--memory-budget", memory_budget,
                        "Bytes allowed for N x N matrices before switching to streaming")
            ->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
    }
    ComputeOptions options() const
    {
        ComputeOptions o;
        o.strategy = strategy == "materialized" ? Strategy::materialized
                     : strategy == "streaming"  ? Strategy::streaming
                                                : Strategy::automatic;
        o.memory_budget_bytes = memory_budget;
        o.threads = threads;
        return o;
    }
};

struct QuadFlags {
    std::optional<double> radius;
    std::optional<std::size_t> panels;
    std::optional<double> tolerance;
    std::optional<std::size_t> max_panels;
    std::optional<std::string> rule;

    void attach(CLI::App* app)
    {
        app->add_option("--quad-radius", radius, "Truncation radius T")->check(CLI::PositiveNumber);
        app->add_option("--quad-panels", panels, "Initial panels per axis")->check(CLI::Range(2, 1 << 24));
        app->add_option("--quad-tolerance", tolerance, "Relative error target")->check(CLI::PositiveNumber);
        app->add_option("--quad-max-panels", max_panels, "Panel budget per axis")->check(CLI::Range(2, 1 << 26));
        app->add_option("--quad-rule", rule, "Panel rule (gk15)")->check(CLI::IsMember({"gk15"}));
    }
    QuadratureSpec apply(QuadratureSpec spec) const
    {
        if (radius)
            spec.truncation_radius = *radius;
        if (panels)
            spec.panel_count = *panels;
        if (tolerance)
            spec.tolerance = *tolerance;
        if (max_panels)
            spec.max_panels = *max_panels;
        else
            spec.max_panels = std::max(spec.max_panels, spec.panel_count);
        if (rule)
            spec.rule = parse_quadrature_rule(*rule);
        spec.validate();
        return spec;
    }
};

json quadrature_json(const IntegralEstimate& e)
{
    json j;
    j["value"] = e.value;
    j["error_estimate"] = e.error_estimate;
    j["discretization_error"] = e.discretization_error;
    j["tail_bound"] = e.tail_bound;
    j["panels"] = e.panels;
    j["converged"] = e.converged;
    return j;
}

void print(std::ostream& out, const json& j)
{
    out << j.dump(2) << "\n";
}

// --- subcommand bodies -----------------------------------------------------

struct SampleFlags {
    std::string x_path;
    std::string y_path;
    std::string delimiter = ",";

    void attach(CLI::App* app)
    {
        app->add_option("--x", x_path, "Sample file for X (header row, numeric columns)")->required();
        app->add_option("--y", y_path, "Sample file for Y")->required();
        app->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    }
};

int do_compute(const SampleFlags& s, const ComputeFlags& c, std::ostream& out)
{
    const char delim = parse_delimiter(s.delimiter);
    const Sample x = load_sample(s.x_path, delim);
    const Sample y = load_sample(s.y_path, delim);
    const auto opts = c.options();
    const PairStats st = dcor(x, y, opts);
    json j = header();
    j["dcov_sq"] = st.dcov_sq;
    j["dvar_x"] = st.dvar_x;
    j["dvar_y"] = st.dvar_y;
    j["dcor"] = st.dcor;
    j["pearson"] = nullable(st.pearson);
    j["n"] = st.n;
    j["strategy"] = resolve_strategy(st.n, opts) == Strategy::materialized ? "materialized" : "streaming";
    print(out, j);
    return ok;
}

int do_test(const SampleFlags& s, const ComputeFlags& c, std::size_t replicates, SeedOption& seed,
            std::ostream& out, std::ostream& err)
{
    const char delim = parse_delimiter(s.delimiter);
    const Sample x = load_sample(s.x_path, delim);
    const Sample y = load_sample(s.y_path, delim);
    const TestResult r = permutation_test(x, y, replicates, seed.resolve(err), c.options());
    json j = header();
    j["statistic"] = r.statistic;
    j["replicates"] = r.replicates;
    j["exceed_count"] = r.exceed_count;
    j["p_value"] = r.p_value;
    j["seed"] = r.seed;
    print(out, j);
    return ok;
}

struct ScreenFlags {
    std::string data;
    std::vector<std::string> columns;
    std::string group_by;
    std::string missing = "reject";
    std::string delimiter = ",";
    std::string out_path;
    std::string format = "csv";
    bool p_values = false;
    std::size_t replicates = 199;
    SeedOption seed;
    double nonlinear_threshold = 0.25;
    double outlier_percentile = 5.0;
    std::size_t min_group_records = 20;
    std::size_t min_group_rows = 3;
    std::vector<std::string> blocks;
};

VariableBlock parse_block(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw CLI::ValidationError("--block", "expected name=col1+col2+..., got '" + spec + "'");
    VariableBlock b{spec.substr(0, eq), {}};
    std::string rest = spec.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        const auto plus = rest.find('+', start);
        const auto part = rest.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
        if (part.empty())
            throw CLI::ValidationError("--block", "empty column name in '" + spec + "'");
        b.columns.push_back(part);
        if (plus == std::string::npos)
            break;
        start = plus + 1;
    }
    return b;
}

int do_screen(ScreenFlags& f, const ComputeFlags& c, std::ostream& out, std::ostream& err)
{
    std::vector<VariableBlock> blocks;
    for (const auto& b : f.blocks)
        blocks.push_back(parse_block(b));
    const PlotFormat format = parse_plot_format(f.format);

    LoadOptions lo;
    lo.delimiter = parse_delimiter(f.delimiter);
    lo.missing = parse_missing_policy(f.missing);
    if (!f.group_by.empty())
        lo.group_column = f.group_by;
    if (blocks.empty()) {
        lo.columns = f.columns;
    } else {
        for (const auto& b : blocks)
            for (const auto& col : b.columns)
                if (std::find(lo.columns.begin(), lo.columns.end(), col) == lo.columns.end())
                    lo.columns.push_back(col);
    }
    const Dataset ds = load_dataset(f.data, lo);
    if (ds.dropped_rows > 0)
        err << "dcorr: dropped " << ds.dropped_rows << " rows with missing values\n";

    ScreenConfig cfg;
    cfg.columns = f.columns;
    cfg.blocks = blocks;
    cfg.p_values = f.p_values;
    cfg.replicates = f.replicates;
    cfg.seed = f.p_values ? f.seed.resolve(err) : f.seed.value;
    cfg.min_group_rows = f.min_group_rows;
    cfg.compute = c.options();
    cfg.dataset_id = f.data;

    OutlierRule rule;
    rule.nonlinear_threshold = f.nonlinear_threshold;
    rule.percentile = f.outlier_percentile;
    rule.min_group_records = f.min_group_records;

    CorrelationTable table = flag_outliers(pairwise_screen(ds, cfg), rule);
    for (const auto& w : table.warnings)
        err << "dcorr: warning: " << w << "\n";
    emit_plot_data(table, format, f.out_path);

    std::map<std::string, std::size_t> per_group;
    std::size_t nonlinear = 0, low = 0;
    for (const auto& r : table.records) {
        ++per_group[r.group];
        nonlinear += r.has_flag(flags::nonlinear_candidate);
        low += r.has_flag(flags::low_dcor_outlier);
    }
    json j = header();
    j["dataset"] = f.data;
    j["output"] = f.out_path;
    j["format"] = f.format;
    j["groups"] = per_group.size();
    j["pairs"] = table.records.size();
    json pg = json::object();
    for (const auto& [g, n] : per_group)
        pg[g] = n;
    j["pairs_per_group"] = pg;
    j["skipped_groups"] = table.skipped_groups;
    j["dropped_rows"] = ds.dropped_rows;
    j["flagged"] = {{std::string(flags::nonlinear_candidate), nonlinear},
                    {std::string(flags::low_dcor_outlier), low}};
    if (f.p_values) {
        j["replicates"] = f.replicates;
        j["seed"] = cfg.seed;
    }
    print(out, j);
    return ok;
}

struct PowerFlags {
    std::string scenario;
    std::size_t n = 50;
    std::size_t trials = 100;
    double alpha = 0.05;
    std::size_t replicates = 199;
    SeedOption seed;
};

int do_power(PowerFlags& f, const ComputeFlags& c, std::ostream& out, std::ostream& err)
{
    const Scenario sc = parse_scenario(f.scenario);
    const PowerReport r = power_simulation(sc, f.n, f.trials, f.alpha, f.replicates, f.seed.resolve(err),
                                           c.options());
    json j = header();
    j["scenario"] = std::string(to_string(r.scenario));
    j["n"] = r.n;
    j["trials"] = r.trials;
    j["alpha"] = r.alpha;
    j["replicates"] = r.replicates;
    j["rejection_rate_dcov"] = r.rejection_rate_dcov;
    j["rejection_rate_pearson"] = r.rejection_rate_pearson;
    j["seed"] = r.seed;
    print(out, j);
    return ok;
}

void report(std::ostream& err, int code, std::string_view kind, std::string_view message)
{
    std::string flat(message);
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    err << "dcorr: error code=" << code << " kind=" << kind << ": " << flat << "\n";
}

int do_verify_dcov(std::size_t n, SeedOption& seed, const QuadFlags& q, std::ostream& out,
                   std::ostream& err)
{
    const QuadratureSpec spec = q.apply(QuadratureSpec{});
    const std::uint64_t s = seed.resolve(err);
    CounterRng rng(s, 0);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rng.normal();
        ys[i] = xs[i] + rng.normal();
    }
    const Sample x = Sample::scalar(xs);
    const Sample y = Sample::scalar(ys);

    const double centred = dcov_sq(x, y);
    const double streamed = dcov_sq_streaming(x, y);
    const double sums = dcov_sq_oracle_sums(x, y);
    IntegralEstimate quad;
    std::string convergence_failure;
    try {
        quad = dcov_sq_via_integral(x, y, spec);
    } catch (const ConvergenceError& e) {
        convergence_failure = e.what();
        quad = e.best();
    }
    const bool algebraic = relative_difference(centred, sums) <= kAlgebraicTolerance &&
                           relative_difference(centred, streamed) <= kAlgebraicTolerance;
    const bool integral =
        std::abs(quad.value - centred) <= std::max(spec.tolerance * std::abs(centred), 3.0 * quad.error_estimate);

    json j = header();
    j["n"] = n;
    j["seed"] = s;
    j["dcov_sq"] = centred;
    j["dcov_sq_streaming"] = streamed;
    j["oracle_sums"] = sums;
    j["quadrature"] = quadrature_json(quad);
    j["algebraic_pass"] = algebraic;
    j["integral_pass"] = integral;
    j["pass"] = algebraic && integral;
    print(out, j);
    if (!convergence_failure.empty()) {
        report(err, failure, "convergence", convergence_failure);
        return failure;
    }
    return algebraic && integral ? ok : failure;
}

int do_verify_singular(double alpha, double x, const QuadFlags& q, std::ostream& out, std::ostream& err)
{
    const QuadratureSpec spec = q.apply(singular_quadrature_defaults());
    SingularParams params{1, alpha, {x}};
    SingularVerification v;
    std::string convergence_failure;
    try {
        v = verify_singular_integral(params, spec);
    } catch (const ConvergenceError& e) {
        convergence_failure = e.what();
        v.numeric = e.best().value;
        v.error_estimate = e.best().error_estimate;
        v.panels = e.best().panels;
        v.closed_form = singular_constant(1, alpha) * std::pow(std::abs(x), alpha);
    }
    const double diff = std::abs(v.numeric - v.closed_form);
    const bool pass = diff <= std::max(kSingularTolerance * std::abs(v.closed_form), 3.0 * v.error_estimate);
    json j = header();
    j["alpha"] = alpha;
    j["x"] = x;
    j["numeric"] = v.numeric;
    j["closed_form"] = v.closed_form;
    j["error_estimate"] = v.error_estimate;
    j["relative_error"] = v.closed_form == 0.0 ? 0.0 : diff / std::abs(v.closed_form);
    j["panels"] = v.panels;
    j["converged"] = v.converged;
    j["pass"] = pass;
    print(out, j);
    if (!convergence_failure.empty()) {
        report(err, failure, "convergence", convergence_failure);
        return failure;
    }
    return pass ? ok : failure;
}

int do_verify_constants(std::ostream& out)
{
    json rows = json::array();
    bool pass = true;
    for (int p = 1; p <= 10; ++p) {
        const double cp = c_p(p);
        const double cs = singular_constant(p, 1.0);
        const double rel = relative_difference(cp, cs);
        pass = pass && rel <= kAlgebraicTolerance;
        rows.push_back({{"p", p}, {"c_p", cp}, {"singular_constant", cs}, {"relative_difference", rel}});
    }
    const double pi = std::numbers::pi;
    const bool anchors = relative_difference(c_p(1), pi) <= kAlgebraicTolerance &&
                         relative_difference(c_p(2), 2 * pi) <= kAlgebraicTolerance &&
                         relative_difference(c_p(3), pi * pi) <= kAlgebraicTolerance;
    json j = header();
    j["constants"] = rows;
    j["anchors_pass"] = anchors;
    j["pass"] = pass && anchors;
    print(out, j);
    return pass && anchors ? ok : failure;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Distance correlation toolkit", "dcorr"};
    app.require_subcommand(1);

    ComputeFlags compute_flags;

    auto* compute = app.add_subcommand("compute", "Distance covariance/correlation of two samples");
    SampleFlags compute_samples;
    compute_samples.attach(compute);
    compute_flags.attach(compute);

    auto* test = app.add_subcommand("test", "Permutation test of independence");
    SampleFlags test_samples;
    test_samples.attach(test);
    std::size_t test_replicates = 999;
    test->add_option("--replicates", test_replicates, "Permutation replicates B")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
        ->capture_default_str();
    SeedOption test_seed;
    test_seed.attach(test);
    ComputeFlags test_compute;
    test_compute.attach(test);

    auto* screen = app.add_subcommand("screen", "Pairwise Pearson vs distance correlation screening");
    ScreenFlags sf;
    screen->add_option("--data", sf.data, "Input table")->required();
    screen->add_option("--columns", sf.columns, "Columns to screen (default: all)")->delimiter(',');
    screen->add_option("--group-by", sf.group_by, "Categorical column partitioning the rows");
    screen->add_option("--missing", sf.missing, "reject, drop-row or pairwise-drop")
        ->check(CLI::IsMember({"reject", "drop-row", "pairwise-drop"}))
        ->capture_default_str();
    screen->add_option("--delimiter", sf.delimiter, "Field delimiter")->capture_default_str();
    screen->add_option("--out", sf.out_path, "Output path")->required();
    screen->add_option("--format", sf.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    screen->add_flag("--p-values", sf.p_values, "Add permutation p-values");
    screen->add_option("--replicates", sf.replicates, "Permutation replicates B")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
        ->capture_default_str();
    sf.seed.attach(screen);
    screen->add_option("--nonlinear-threshold", sf.nonlinear_threshold, "Flag when dcor - |pearson| >= this")
        ->capture_default_str();
    screen->add_option("--outlier-percentile", sf.outlier_percentile, "Low-dcor percentile within a group")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    screen->add_option("--min-group-records", sf.min_group_records, "Pairs needed before percentile flagging")
        ->capture_default_str();
    screen->add_option("--min-group-rows", sf.min_group_rows, "Rows needed to screen a group")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))
        ->capture_default_str();
    screen->add_option("--block", sf.blocks, "Vector variable name=col1+col2 (repeatable)");
    ComputeFlags screen_compute;
    screen_compute.attach(screen);

    auto* power = app.add_subcommand("power", "Rejection rates of dCov vs Pearson permutation tests");
    PowerFlags pf;
    power->add_option("--scenario", pf.scenario, "independent, linear or quadratic")
        ->required()
        ->check(CLI::IsMember({"independent", "linear", "quadratic"}));
    power->add_option("--n", pf.n, "Sample size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 32))->capture_default_str();
    power->add_option("--trials", pf.trials, "Simulated data sets")->check(CLI::PositiveNumber)->capture_default_str();
    power->add_option("--alpha", pf.alpha, "Rejection level")->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    power->add_option("--replicates", pf.replicates, "Permutation replicates B")->check(CLI::PositiveNumber)->capture_default_str();
    pf.seed.attach(power);
    ComputeFlags power_compute;
    power_compute.attach(power);

    auto* verify = app.add_subcommand("verify", "Re-check the estimator against independent oracles");
    verify->require_subcommand(1);
    auto* vdcov = verify->add_subcommand("dcov", "Pairwise-distance formula vs triple sums vs quadrature");
    std::size_t vdcov_n = 4;
    vdcov->add_option("--n", vdcov_n, "Sample size")->check(CLI::Range(2, 64))->capture_default_str();
    SeedOption vdcov_seed;
    vdcov_seed.attach(vdcov);
    QuadFlags vdcov_quad;
    vdcov_quad.attach(vdcov);

    auto* vsing = verify->add_subcommand("singular", "Singular integral: quadrature vs closed form");
    double vs_alpha = 1.0;
    double vs_x = 1.0;
    vsing->add_option("--alpha", vs_alpha, "Exponent in (0, 2)")->check(CLI::Range(0.0, 2.0))->capture_default_str();
    vsing->add_option("--x", vs_x, "Argument x")->capture_default_str();
    QuadFlags vsing_quad;
    vsing_quad.attach(vsing);

    auto* vconst = verify->add_subcommand("constants", "c_p against the singular-integral constant at alpha = 1");

    try {
        std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
        std::reverse(reversed.begin(), reversed.end());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        report(err, usage, "usage", e.what());
        return usage;
    }

    try {
        if (*compute)
            return do_compute(compute_samples, compute_flags, out);
        if (*test)
            return do_test(test_samples, test_compute, test_replicates, test_seed, out, err);
        if (*screen)
            return do_screen(sf, screen_compute, out, err);
        if (*power)
            return do_power(pf, power_compute, out, err);
        if (*vdcov)
            return do_verify_dcov(vdcov_n, vdcov_seed, vdcov_quad, out, err);
        if (*vsing)
            return do_verify_singular(vs_alpha, vs_x, vsing_quad, out, err);
        if (*vconst)
            return do_verify_constants(out);
    } catch (const CLI::ValidationError& e) {
        report(err, usage, "usage", e.what());
        return usage;
    } catch (const DomainError& e) {
        report(err, usage, "usage", e.what());
        return usage;
    } catch (const ConvergenceError& e) {
        report(err, failure, "convergence", e.what());
        return failure;
    } catch (const DataError& e) {
        report(err, data, "data", e.what());
        return data;
    } catch (const DimensionError& e) {
        report(err, data, "dimension", e.what());
        return data;
    } catch (const DegenerateVarianceError& e) {
        report(err, data, "degenerate", e.what());
        return data;
    } catch (const IoError& e) {
        report(err, data, "io", e.what());
        return data;
    } catch (const std::exception& e) {
        report(err, failure, "computation", e.what());
        return failure;
    }
    report(err, usage, "usage", "no subcommand");
    return usage;
}

} // namespace dcorr::cli
