#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dcorr/core_stats.hpp"
#include "dcorr/dataset.hpp"
#include "dcorr/error.hpp"
#include "dcorr/io.hpp"
#include "dcorr/screening.hpp"
#include "fixtures.hpp"

using namespace dcorr;

namespace {

Dataset grouped(const std::string& text, const std::string& group = "type")
{
    LoadOptions opts;
    opts.group_column = group;
    return parse_dataset(text, opts);
}

// u ~ U(-1, 1), u^2 and an independent N(0, 1) noise column.
Dataset parabola_fixture(std::uint64_t seed)
{
    CounterRng rng(seed, 0);
    std::ostringstream text;
    text.precision(17);
    text << "u,u2,noise\n";
    for (int i = 0; i < 200; ++i) {
        const double u = rng.uniform(-1.0, 1.0);
        text << u << ',' << u * u << ',' << rng.normal() << '\n';
    }
    return parse_dataset(text.str(), {});
}

const CorrelationRecord& find(const CorrelationTable& t, std::string_view g, std::string_view a,
                              std::string_view b)
{
    for (const auto& r : t.records)
        if (r.group == g && r.var_a == a && r.var_b == b)
            return r;
    FAIL("record not found");
    return t.records.front();
}

CorrelationRecord record(std::string group, std::string a, std::string b, double pearson, double dcor)
{
    CorrelationRecord r;
    r.group = std::move(group);
    r.var_a = std::move(a);
    r.var_b = std::move(b);
    r.n = 10;
    r.pearson = pearson;
    r.dcor = dcor;
    return r;
}

} // namespace

TEST_SUITE("screening") {

TEST_CASE("33 variables in one group give 528 records")
{
    const auto d = parse_dataset(fixtures::synthetic_table(33, 60, 1, 5), {});
    const auto t = pairwise_screen(d, {});
    CHECK(t.records.size() == 528);
    for (const auto& r : t.records) {
        CHECK(r.group == "all");
        CHECK(r.var_a < r.var_b);
        CHECK(r.n == 60);
        REQUIRE(r.pearson.has_value());
        REQUIRE(r.dcor.has_value());
        CHECK(*r.pearson >= -1.0);
        CHECK(*r.pearson <= 1.0);
        CHECK(*r.dcor >= 0.0);
        CHECK(*r.dcor <= 1.0);
        CHECK_FALSE(r.p_value.has_value());
    }
}

TEST_CASE("records per group are K(K-1)/2")
{
    const auto d = grouped(fixtures::synthetic_table(7, 80, 4, 6));
    const auto t = pairwise_screen(d, {});
    CHECK(t.records.size() == 4 * 21);
    for (const auto& g : d.groups())
        CHECK(std::count_if(t.records.begin(), t.records.end(), [&](const auto& r) { return r.group == g; }) == 21);
}

TEST_CASE("two variables give a single record matching the core statistics")
{
    const auto d = parse_dataset("b,a\n1,2\n2,1\n3,5\n4,4\n", {});
    const auto t = pairwise_screen(d, {});
    REQUIRE(t.records.size() == 1);
    const auto& r = t.records[0];
    CHECK(r.var_a == "a");
    CHECK(r.var_b == "b");
    const auto a = Sample::scalar(d.column("a").values);
    const auto b = Sample::scalar(d.column("b").values);
    CHECK(*r.dcor == doctest::Approx(dcor(a, b).dcor).epsilon(1e-14));
    CHECK(*r.pearson == doctest::Approx(pearson(a, b)).epsilon(1e-14));
}

TEST_CASE("nonlinear parabola is separated from noise")
{
    const auto t = pairwise_screen(parabola_fixture(2024), {});
    const auto& para = find(t, "all", "u", "u2");
    CHECK(std::abs(*para.pearson) < 0.2);
    CHECK(*para.dcor > 0.4);
    CHECK(*find(t, "all", "noise", "u").dcor < 0.25);
    CHECK(*find(t, "all", "noise", "u2").dcor < 0.25);

    const auto flagged = flag_outliers(t);
    CHECK(find(flagged, "all", "u", "u2").has_flag(flags::nonlinear_candidate));
    CHECK_FALSE(find(flagged, "all", "noise", "u").has_flag(flags::nonlinear_candidate));
}

TEST_CASE("column order does not change the records")
{
    const std::string text = fixtures::synthetic_table(5, 40, 1, 8);
    LoadOptions fwd, rev;
    fwd.columns = {"v01", "v02", "v03", "v04", "v05"};
    rev.columns = {"v05", "v04", "v03", "v02", "v01"};
    const auto a = render_plot_data(pairwise_screen(parse_dataset(text, fwd), {}), PlotFormat::csv);
    const auto b = render_plot_data(pairwise_screen(parse_dataset(text, rev), {}), PlotFormat::csv);
    CHECK(a == b);
}

TEST_CASE("group decomposition")
{
    const std::string text = fixtures::synthetic_table(6, 90, 3, 9);
    const auto full = pairwise_screen(grouped(text), {});

    // Rebuild T2 alone as an ungrouped table.
    const auto rows = parse_dsv(text, ',');
    std::string t2;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r > 0 && rows[r][0] != "T2")
            continue;
        for (std::size_t c = 1; c < rows[r].size(); ++c)
            t2 += rows[r][c] + (c + 1 < rows[r].size() ? "," : "\n");
    }
    const auto single = pairwise_screen(parse_dataset(t2, {}), {});
    REQUIRE(single.records.size() == 15);
    for (const auto& r : single.records) {
        const auto& g = find(full, "T2", r.var_a, r.var_b);
        CHECK(g.n == r.n);
        CHECK(std::abs(*g.dcor - *r.dcor) <= 1e-12);
        CHECK(std::abs(*g.pearson - *r.pearson) <= 1e-12);
    }
}

TEST_CASE("p-values are seeded per pair and reproducible")
{
    const std::string text = fixtures::synthetic_table(4, 60, 2, 10);
    ScreenConfig cfg;
    cfg.p_values = true;
    cfg.replicates = 49;
    cfg.seed = 77;
    const auto a = pairwise_screen(grouped(text), cfg);
    const auto b = pairwise_screen(grouped(text), cfg);
    CHECK(render_plot_data(a, PlotFormat::json) == render_plot_data(b, PlotFormat::json));
    CHECK(a.replicates == 49);
    CHECK(a.seed == 77);
    for (const auto& r : a.records) {
        REQUIRE(r.p_value.has_value());
        CHECK(*r.p_value >= 1.0 / 50.0);
        CHECK(*r.p_value <= 1.0);
    }
    ScreenConfig threaded = cfg;
    threaded.compute.threads = 3;
    CHECK(render_plot_data(pairwise_screen(grouped(text), threaded), PlotFormat::csv) ==
          render_plot_data(a, PlotFormat::csv));
}

TEST_CASE("small groups are skipped with a warning")
{
    const std::string text = "type,a,b\nA,1,2\nA,2,3\nA,3,1\nA,4,4\nB,1,1\nB,2,2\n";
    const auto t = pairwise_screen(grouped(text), {});
    CHECK(t.records.size() == 1);
    CHECK(t.records[0].group == "A");
    CHECK(t.skipped_groups == std::vector<std::string>{"B"});
    REQUIRE(t.warnings.size() == 1);
    CHECK(t.warnings[0].find("B") != std::string::npos);

    ScreenConfig strict;
    strict.min_group_rows = 10;
    CHECK_THROWS_AS(pairwise_screen(grouped(text), strict), DataError);
}

TEST_CASE("fewer than two variables is rejected")
{
    CHECK_THROWS_AS(pairwise_screen(parse_dataset("a\n1\n2\n3\n", {}), {}), DomainError);
}

TEST_CASE("constant column gives null pearson and a flag")
{
    const auto t = pairwise_screen(parse_dataset("a,b\n1,5\n2,5\n3,5\n4,5\n", {}), {});
    REQUIRE(t.records.size() == 1);
    CHECK_FALSE(t.records[0].pearson.has_value());
    CHECK(*t.records[0].dcor == 0.0);
    CHECK(t.records[0].has_flag(flags::constant_variable));
}

TEST_CASE("pairwise-drop uses per-pair complete cases")
{
    LoadOptions opts;
    opts.missing = MissingPolicy::pairwise_drop;
    const auto d = parse_dataset("a,b,c\n1,2,3\n2,,1\n3,1,4\n4,5,2\n5,3,5\n", opts);
    const auto t = pairwise_screen(d, {});
    CHECK(find(t, "all", "a", "b").n == 4);
    CHECK(find(t, "all", "a", "c").n == 5);
    CHECK(find(t, "all", "b", "c").n == 4);
}

TEST_CASE("pairs left with too few complete cases are marked")
{
    LoadOptions opts;
    opts.missing = MissingPolicy::pairwise_drop;
    const auto d = parse_dataset("a,b,c\n1,,3\n2,,1\n3,1,4\n4,5,2\n5,3,5\n6,,1\n", opts);
    ScreenConfig cfg;
    cfg.min_group_rows = 4;
    const auto t = pairwise_screen(d, cfg);
    const auto& ab = find(t, "all", "a", "b");
    CHECK(ab.n == 3);
    CHECK(ab.has_flag(flags::insufficient_data));
    CHECK_FALSE(ab.dcor.has_value());
    CHECK(find(t, "all", "a", "c").dcor.has_value());
}

TEST_CASE("vector blocks")
{
    const std::string text = fixtures::synthetic_table(4, 50, 1, 11);
    ScreenConfig cfg;
    cfg.blocks = {{"first", {"v01", "v02"}}, {"second", {"v03", "v04"}}};
    const auto t = pairwise_screen(parse_dataset(text, {}), cfg);
    REQUIRE(t.records.size() == 1);
    const auto& r = t.records[0];
    CHECK(r.var_a == "first");
    CHECK_FALSE(r.pearson.has_value());
    const auto d = parse_dataset(text, {});
    std::vector<std::vector<double>> xa, xb;
    for (std::size_t i = 0; i < 50; ++i) {
        xa.push_back({d.column("v01").values[i], d.column("v02").values[i]});
        xb.push_back({d.column("v03").values[i], d.column("v04").values[i]});
    }
    CHECK(*r.dcor == doctest::Approx(dcor(Sample::from_rows(xa), Sample::from_rows(xb)).dcor).epsilon(1e-14));
}

TEST_CASE("nonlinear flag arithmetic")
{
    CorrelationTable t;
    t.records = {record("g", "a", "b", 0.0, 0.5), record("g", "a", "c", 0.9, 0.95),
                 record("g", "b", "c", -0.1, 0.4)};
    const auto f = flag_outliers(t);
    CHECK(f.records[0].has_flag(flags::nonlinear_candidate));
    CHECK(f.records[1].flags.empty());
    CHECK(f.records[2].has_flag(flags::nonlinear_candidate));

    OutlierRule loose;
    loose.nonlinear_threshold = 0.35;
    CHECK_FALSE(flag_outliers(t, loose).records[2].has_flag(flags::nonlinear_candidate));
}

TEST_CASE("single record is never a percentile outlier")
{
    CorrelationTable t;
    t.records = {record("g", "a", "b", 0.8, 0.1)};
    const auto f = flag_outliers(t);
    CHECK_FALSE(f.records[0].has_flag(flags::low_dcor_outlier));
    CHECK_THROWS_AS(flag_outliers(CorrelationTable{}), DataError);
}

TEST_CASE("percentile rule flags low dcor with above-median pearson")
{
    CorrelationTable t;
    for (int i = 0; i < 40; ++i)
        t.records.push_back(record("g", "v" + std::to_string(100 + i), "w", 0.3 + 0.01 * i, 0.5 + 0.01 * i));
    // lowest dcor, high |pearson|
    t.records.push_back(record("g", "x1", "y", -0.95, 0.05));
    // lowest-but-one dcor, small |pearson|
    t.records.push_back(record("g", "x2", "y", 0.01, 0.06));
    const auto f = flag_outliers(t);
    CHECK(f.records[40].has_flag(flags::low_dcor_outlier));
    CHECK_FALSE(f.records[41].has_flag(flags::low_dcor_outlier));
    CHECK(std::none_of(f.records.begin(), f.records.begin() + 40,
                       [](const auto& r) { return r.has_flag(flags::low_dcor_outlier); }));
    // order preserved
    CHECK(f.records[40].var_a == "x1");

    // Too few records in the group deactivates the rule.
    OutlierRule rule;
    rule.min_group_records = 100;
    CHECK_FALSE(flag_outliers(t, rule).records[40].has_flag(flags::low_dcor_outlier));
}

TEST_CASE("flags are re-derived, not accumulated")
{
    CorrelationTable t;
    t.records = {record("g", "a", "b", 0.0, 0.5)};
    const auto once = flag_outliers(t);
    const auto twice = flag_outliers(once);
    CHECK(twice.records[0].flags == once.records[0].flags);
}

TEST_CASE("percentile helper")
{
    CHECK(percentile({3.0, 1.0, 2.0}, 50.0) == 2.0);
    CHECK(percentile({1.0, 2.0}, 25.0) == doctest::Approx(1.25));
    CHECK(percentile({5.0}, 5.0) == 5.0);
    CHECK(percentile({1.0, 9.0}, 0.0) == 1.0);
    CHECK(percentile({1.0, 9.0}, 100.0) == 9.0);
}

TEST_CASE("plot data emission")
{
    CorrelationTable t;
    t.records = {record("g2", "a", "b", 0.5, 0.6), record("g1", "b", "c", -0.25, 0.75),
                 record("g1", "a", "c", 0.125, 0.5)};
    t.records[1].flags = {"nonlinear-candidate", "low-dcor-outlier"};
    t.records[2].p_value = 0.01;

    const auto csv = render_plot_data(t, PlotFormat::csv);
    CHECK(csv ==
          "group,var_a,var_b,n,pearson,dcor,p_value,flags\n"
          "g1,a,c,10,0.125,0.5,0.01,\n"
          "g1,b,c,10,-0.25,0.75,,nonlinear-candidate;low-dcor-outlier\n"
          "g2,a,b,10,0.5,0.6,,\n");

    const auto js = nlohmann::ordered_json::parse(render_plot_data(t, PlotFormat::json));
    REQUIRE(js.is_array());
    REQUIRE(js.size() == 3);
    CHECK(js[0]["group"] == "g1");
    CHECK(js[0]["p_value"] == 0.01);
    CHECK(js[1]["p_value"].is_null());
    CHECK(js[1]["flags"] == nlohmann::ordered_json::array({"nonlinear-candidate", "low-dcor-outlier"}));
    std::vector<std::string> keys;
    for (const auto& [k, v] : js[0].items())
        keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"group", "var_a", "var_b", "n", "pearson", "dcor", "p_value", "flags"});

    CHECK(render_plot_data(CorrelationTable{}, PlotFormat::csv) == "group,var_a,var_b,n,pearson,dcor,p_value,flags\n");
    CHECK(render_plot_data(CorrelationTable{}, PlotFormat::json) == "[]\n");
}

TEST_CASE("csv quoting of awkward names")
{
    CorrelationTable t;
    t.records = {record("North, East", "a\"b", "c", 0.5, 0.5)};
    const auto csv = render_plot_data(t, PlotFormat::csv);
    CHECK(csv.find("\"North, East\",\"a\"\"b\",c,") != std::string::npos);
}

TEST_CASE("emitted files are byte-identical and unwritable paths fail")
{
    fixtures::TempDir dir;
    const auto d = parse_dataset(fixtures::synthetic_table(33, 40, 1, 12), {});
    const auto t = flag_outliers(pairwise_screen(d, {}));
    emit_plot_data(t, PlotFormat::csv, dir / "a.csv");
    emit_plot_data(t, PlotFormat::csv, dir / "b.csv");
    const auto a = read_file(dir / "a.csv");
    CHECK(a == read_file(dir / "b.csv"));
    CHECK(std::count(a.begin(), a.end(), '\n') == 529);
    CHECK_THROWS_AS(emit_plot_data(t, PlotFormat::csv, dir / "missing" / "x.csv"), IoError);

    CHECK(parse_plot_format("json") == PlotFormat::json);
    CHECK_THROWS_AS(parse_plot_format("xml"), DomainError);
}

} // TEST_SUITE
