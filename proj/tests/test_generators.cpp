#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "tailex/errors.hpp"
#include "tailex/generators.hpp"

using namespace tailex;

namespace {

double empirical_survival(const std::vector<double>& xs, double level) {
    std::size_t count = 0;
    for (double x : xs) count += x > level;
    return static_cast<double>(count) / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("row lengths follow the discrete power law at integer levels") {
    RowLengthLaw law{2.0, 0, 1};
    auto lens = gen_row_lengths(200000, law, 11);
    auto survival = [&](std::uint32_t m) {
        std::size_t count = 0;
        for (auto v : lens) count += v > m;
        return static_cast<double>(count) / static_cast<double>(lens.size());
    };
    CHECK(survival(1) == doctest::Approx(1.0).epsilon(1e-4));  // ceil(U^(-1/2)) >= 2 a.s.
    CHECK(survival(2) == doctest::Approx(0.25).epsilon(0.02));
    CHECK(survival(4) == doctest::Approx(0.0625).epsilon(0.05));
}

TEST_CASE("row lengths respect min and cap clamps") {
    RowLengthLaw law{1.0, 5, 2};
    auto lens = gen_row_lengths(5000, law, 7);
    CHECK(*std::min_element(lens.begin(), lens.end()) >= 2);
    CHECK(*std::max_element(lens.begin(), lens.end()) <= 5);
}

TEST_CASE("huge alpha collapses row lengths to the minimum") {
    RowLengthLaw law{1e18, 0, 1};
    auto lens = gen_row_lengths(2000, law, 3);
    CHECK(*std::max_element(lens.begin(), lens.end()) == 1);
}

TEST_CASE("row length law validation") {
    const RowLengthLaw zero_alpha{0.0, 0, 1};
    const RowLengthLaw cap_below_min{1.0, 2, 3};
    const RowLengthLaw zero_min{1.0, 0, 0};
    CHECK_THROWS_AS(zero_alpha.validate(), ConfigError);
    CHECK_THROWS_AS(cap_below_min.validate(), ConfigError);
    CHECK_THROWS_AS(zero_min.validate(), ConfigError);
}

TEST_CASE("iid column has the requested Pareto marginal") {
    ParetoLaw law{1.5, 2.0};
    auto xs = gen_iid_column(100000, law, 3);
    CHECK(*std::min_element(xs.begin(), xs.end()) >= 2.0);
    for (double p : {0.5, 0.9, 0.99}) {
        const double level = pareto_quantile(p, law);
        CHECK(empirical_survival(xs, level) == doctest::Approx(1.0 - p).epsilon(0.05));
    }
}

TEST_CASE("armax column keeps the exact Pareto marginal under dependence") {
    const double k = 1.5;
    auto xs = gen_armax_column(200000, k, 0.7, 19);
    ParetoLaw law{k, 1.0};
    for (double p : {0.5, 0.9, 0.99}) {
        const double level = pareto_quantile(p, law);
        const double expected = 1.0 - p;
        CHECK(std::abs(empirical_survival(xs, level) - expected) < 0.01);
    }
    CHECK(*std::min_element(xs.begin(), xs.end()) >= 1.0);
}

TEST_CASE("armax with theta 1 has no serial clustering") {
    auto xs = gen_armax_column(50000, 1.0, 1.0, 23);
    // Under independence consecutive exceedances of the 0.99 quantile are
    // rare: expected pair count ~ n * 0.0001.
    const double level = pareto_quantile(0.99, ParetoLaw(1.0, 1.0));
    std::size_t pairs = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) pairs += xs[i] > level && xs[i - 1] > level;
    CHECK(pairs < 30);
}

TEST_CASE("armax with small theta clusters its exceedances") {
    auto xs = gen_armax_column(50000, 1.0, 0.2, 29);
    const double level = pareto_quantile(0.99, ParetoLaw(1.0, 1.0));
    std::size_t pairs = 0, hits = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        hits += xs[i] > level;
        pairs += xs[i] > level && xs[i - 1] > level;
    }
    // Mean cluster size 1/theta = 5, so a large share of exceedances sit in runs.
    CHECK(pairs > hits / 4);
}

TEST_CASE("armax rejects degenerate extremal indices") {
    CHECK_THROWS_AS(gen_armax_column(10, 1.0, 0.0, 1), std::domain_error);
    CHECK_THROWS_AS(gen_armax_column(10, 1.0, 1.5, 1), std::domain_error);
    CHECK_NOTHROW(gen_armax_column(10, 1.0, 1.0, 1));
}

TEST_CASE("columns are reproducible from the seed") {
    auto a = gen_armax_column(500, 1.0, 0.5, 42);
    auto b = gen_armax_column(500, 1.0, 0.5, 42);
    auto c = gen_armax_column(500, 1.0, 0.5, 43);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("domination screen demands chi * alpha strictly above 1") {
    auto ok = check_domination(1.0, 6.0, 0.2);
    CHECK(ok.pass);
    CHECK(ok.row_tail_exponent == doctest::Approx(1.2));
    CHECK(ok.margin == doctest::Approx(0.2));

    auto boundary = check_domination(1.0, 5.0, 0.2);
    CHECK_FALSE(boundary.pass);

    auto bad = check_domination(1.0, 1.5, 0.5);
    CHECK_FALSE(bad.pass);
    CHECK(bad.margin == doctest::Approx(-0.25));
}

TEST_CASE("dominating count law validates and samples within bounds") {
    DominatingCountLaw law;
    law.values = {1, 2};
    law.probs = {0.5, 0.5};
    law.validate(4);

    Rng rng(5);
    std::size_t twos = 0;
    const std::size_t draws = 20000;
    for (std::size_t i = 0; i < draws; ++i) {
        auto v = law.sample(rng);
        CHECK(v >= 1);
        CHECK(v <= 2);
        twos += v == 2;
    }
    CHECK(static_cast<double>(twos) / draws == doctest::Approx(0.5).epsilon(0.05));

    DominatingCountLaw bad_sum;
    bad_sum.values = {1, 2};
    bad_sum.probs = {0.5, 0.4};
    CHECK_THROWS_AS(bad_sum.validate(4), ConfigError);

    DominatingCountLaw too_big;
    too_big.values = {4};
    too_big.probs = {1.0};
    CHECK_THROWS_AS(too_big.validate(4), ConfigError);
}

TEST_CASE("identical scenario aliases the dominating block") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5, 0.5}, 3);
    auto m = gen_matrix(profile, ScenarioKind::identical, 200, RowLengthLaw(2.0, 0, 1), 77);
    for (std::size_t r = 0; r < m.rows; ++r) {
        CHECK(m.at(r, 1) == m.at(r, 0));
    }
    // The light column stays its own series.
    std::size_t diff = 0;
    for (std::size_t r = 0; r < m.rows; ++r) diff += m.at(r, 2) != m.at(r, 0);
    CHECK(diff > 150);
}

TEST_CASE("independent scenario keeps dominating columns distinct") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5, 0.5}, 2);
    auto m = gen_matrix(profile, ScenarioKind::independent, 200, RowLengthLaw(2.0, 0, 1), 78);
    std::size_t diff = 0;
    for (std::size_t r = 0; r < m.rows; ++r) diff += m.at(r, 1) != m.at(r, 0);
    CHECK(diff > 150);
}

TEST_CASE("cumulative scenario stacks partial sums in the dominating block") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5, 0.5, 0.5, 0.5}, 5);
    auto m = gen_matrix(profile, ScenarioKind::cumulative, 100, RowLengthLaw(2.0, 0, 1), 79);
    for (std::size_t r = 0; r < m.rows; ++r) {
        CHECK(m.at(r, 1) == doctest::Approx(m.at(r, 0)));
        CHECK(m.at(r, 2) == doctest::Approx(2.0 * m.at(r, 0)));
        CHECK(m.at(r, 3) == doctest::Approx(4.0 * m.at(r, 0)));
    }

    auto single = TailProfile::uniform(1.0, 3.0, {0.5}, 3);
    CHECK_THROWS_AS(gen_matrix(single, ScenarioKind::cumulative, 10, RowLengthLaw(), 1),
                    ConfigError);
}

TEST_CASE("alternating scenario duplicates odd rows only") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5, 0.5}, 2);
    auto m = gen_matrix(profile, ScenarioKind::alternating, 200, RowLengthLaw(2.0, 0, 1), 80);
    std::size_t even_diff = 0;
    for (std::size_t r = 0; r < m.rows; ++r) {
        if (r % 2 == 0)
            CHECK(m.at(r, 1) == m.at(r, 0));  // 1-based odd rows share one value
        else
            even_diff += m.at(r, 1) != m.at(r, 0);
    }
    CHECK(even_diff > 80);
}

TEST_CASE("matrix generation is deterministic and caps row lengths at the column count") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5}, 3);
    RowLengthLaw law{0.5, 0, 1};  // heavy: raw lengths frequently exceed 3 columns
    auto a = gen_matrix(profile, ScenarioKind::independent, 300, law, 5);
    auto b = gen_matrix(profile, ScenarioKind::independent, 300, law, 5);
    CHECK(a.values == b.values);
    CHECK(a.row_len == b.row_len);
    CHECK(a.fingerprint == b.fingerprint);
    CHECK(*std::max_element(a.row_len.begin(), a.row_len.end()) <= 3);
    CHECK(*std::min_element(a.row_len.begin(), a.row_len.end()) >= 1);
}

TEST_CASE("row length coupling hook overrides the independent draw") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5}, 4);
    auto hook = [](const SeriesMatrix& m, std::uint64_t) {
        std::vector<std::uint32_t> lens(m.rows);
        for (std::size_t r = 0; r < m.rows; ++r)
            lens[r] = m.at(r, 0) > 2.0 ? 9 : 2;  // 9 must clamp to 4 columns
        return lens;
    };
    auto m = gen_matrix(profile, ScenarioKind::independent, 100, RowLengthLaw(), 6, hook);
    for (std::size_t r = 0; r < m.rows; ++r) {
        if (m.at(r, 0) > 2.0)
            CHECK(m.row_len[r] == 4);
        else
            CHECK(m.row_len[r] == 2);
    }
}

TEST_CASE("personalization column laws") {
    PersonalizationLaw none;
    CHECK(gen_q_column(10, none, 1).empty());

    PersonalizationLaw uniform{PersonalizationLaw::Kind::uniform, 0.85, 4.0, 1.0};
    uniform.validate(1.0);
    auto q = gen_q_column(4, uniform, 1);
    REQUIRE(q.size() == 4);
    for (double v : q) CHECK(v == doctest::Approx(0.0375));

    PersonalizationLaw pareto{PersonalizationLaw::Kind::pareto, 0.85, 4.0, 2.0};
    pareto.validate(1.0);
    auto qp = gen_q_column(1000, pareto, 9);
    CHECK(*std::min_element(qp.begin(), qp.end()) >= 2.0);

    PersonalizationLaw light{PersonalizationLaw::Kind::pareto, 0.85, 0.9, 1.0};
    CHECK_THROWS_AS(light.validate(1.0), ConfigError);
    PersonalizationLaw bad_c{PersonalizationLaw::Kind::uniform, 1.0, 4.0, 1.0};
    CHECK_THROWS_AS(bad_c.validate(1.0), ConfigError);
}

TEST_CASE("binary matrix files round-trip") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5, 0.8}, 3);
    auto m = gen_matrix(profile, ScenarioKind::independent, 50, RowLengthLaw(1.5, 0, 1), 21);
    m.q = gen_q_column(50, PersonalizationLaw(PersonalizationLaw::Kind::pareto, 0.85, 4.0, 1.0), 22);

    const std::string path = "test_matrix_roundtrip.bin";
    write_matrix_binary(m, path);
    auto back = read_matrix_binary(path);
    std::remove(path.c_str());

    CHECK(back.rows == m.rows);
    CHECK(back.cols == m.cols);
    CHECK(back.row_len == m.row_len);
    CHECK(back.fingerprint == m.fingerprint);
    CHECK(back.q == m.q);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.row_len[r]; ++c) CHECK(back.at(r, c) == m.at(r, c));
}

TEST_CASE("csv export writes one line per active cell") {
    auto profile = TailProfile::uniform(1.0, 3.0, {0.5}, 3);
    auto m = gen_matrix(profile, ScenarioKind::independent, 20, RowLengthLaw(1.5, 0, 1), 31);
    const std::string path = "test_matrix_cells.csv";
    write_matrix_csv(m, path);

    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    in.close();
    std::remove(path.c_str());

    std::size_t active = 0;
    for (auto len : m.row_len) active += len;
    CHECK(lines == active + 1);  // header
}
