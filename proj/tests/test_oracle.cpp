#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "pensionopt/closed_form.hpp"
#include "pensionopt/frontier.hpp"
#include "pensionopt/mc_engine.hpp"
#include "pensionopt/oracle.hpp"
#include "support.hpp"

using namespace pensionopt;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Oracle value at the benchmark with T = 5 and the default spec, frozen when the
// oracle was cross-checked against LSMC and the one-period closed form.
constexpr double kBenchmarkT5 = 0.000426140532;

TEST_CASE("spec validation and guards", "[oracle][errors]") {
    OracleSpec s;
    REQUIRE_NOTHROW(validate(s));
    auto bad = [](auto mutate, const char* field) {
        OracleSpec x;
        mutate(x);
        CHECK_THROWS_WITH(validate(x), ContainsSubstring(field));
    };
    bad([](OracleSpec& x) { x.n_w = 199; }, "oracle.n_w");
    bad([](OracleSpec& x) { x.n_quad = 15; }, "oracle.n_quad");
    bad([](OracleSpec& x) { x.w_max = -1.0; }, "oracle.w_max");
    bad([](OracleSpec& x) { x.grid_scale = -1.0; }, "oracle.grid_scale");
    bad([](OracleSpec& x) { x.interpolation = Interpolation::MonotoneCubic; }, "oracle.interpolation");

    const auto m = testsupport::benchmark_market();
    CHECK_THROWS_WITH(dp_value(0, 0.0, s, testsupport::benchmark_plan(30.0), m), ContainsSubstring("horizon too long"));
    CHECK_NOTHROW(dp_value(20, 0.0, s, testsupport::benchmark_plan(30.0), m));
    CHECK_THROWS(dp_value(0, 0.0, s, testsupport::benchmark_plan(5.5), m));
    CHECK_THROWS(dp_value(5, 0.0, s, testsupport::benchmark_plan(5.0), m));
    CHECK_THROWS(dp_value(0, -1.0, s, testsupport::benchmark_plan(5.0), m));
}

TEST_CASE("one period equals the Black-Scholes closed form", "[oracle]") {
    const auto m = testsupport::benchmark_market();
    for (double T : {1.0, 5.0, 30.0}) {
        const auto p = testsupport::benchmark_plan(T);
        const double k_last = T * accrual_value(p) * std::exp(m.mu_l * (T - 1.0));
        for (double frac : {0.0, 0.5, 0.9, 0.97, 1.0, 1.05, 1.5}) {
            const double w0 = frac * k_last;
            const auto bs = bs_one_period(w0, p, m);
            CHECK_THAT(dp_value(static_cast<int>(T) - 1, w0, OracleSpec{}, p, m).value, WithinAbs(bs.v, 1e-6));
        }
    }
}

TEST_CASE("unreachable payoff is worthless", "[oracle]") {
    auto p = testsupport::benchmark_plan(5.0);
    const auto m = testsupport::benchmark_market();
    p.c = 1e-9;
    const auto v = dp_value(0, 0.0, OracleSpec{}, p, m);
    CHECK_THAT(v.value, WithinAbs(0.0, 1e-12));
}

TEST_CASE("benchmark fixture and LSMC agreement", "[oracle]") {
    const auto p = testsupport::benchmark_plan(5.0);
    const auto m = testsupport::benchmark_market();
    const auto v = dp_value(0, 0.0, OracleSpec{}, p, m);
    CHECK(v.method == Method::Oracle);
    CHECK_THAT(v.value, WithinRel(kBenchmarkT5, 1e-8));
    CHECK(v.std_error < 1e-6);
    const auto lsmc = price_bermudan_lsmc(McSpec{}, p, m);
    CHECK(std::abs(lsmc.option.value - v.value) <= 3.0 * std::hypot(lsmc.option.std_error, v.std_error));
}

TEST_CASE("quadrature and interpolation choices agree", "[oracle]") {
    const auto p = testsupport::benchmark_plan(8.0);
    const auto m = testsupport::benchmark_market();
    const double exact = dp_value(0, 0.0, OracleSpec{}, p, m).value;
    OracleSpec gh;
    gh.quadrature = Quadrature::GaussHermite;
    CHECK_THAT(dp_value(0, 0.0, gh, p, m).value, WithinAbs(exact, 2e-5));
    gh.interpolation = Interpolation::MonotoneCubic;
    CHECK_THAT(dp_value(0, 0.0, gh, p, m).value, WithinAbs(exact, 2e-5));
    OracleSpec fine;
    fine.n_w = 8000;
    CHECK_THAT(dp_value(0, 0.0, fine, p, m).value, WithinAbs(exact, 5e-6));
}

TEST_CASE("value grids are monotone and convex in wealth", "[oracle][property]") {
    for (const auto& rc : testsupport::random_cases(8, 51, 6.0)) {
        auto p = rc.plan;
        p.gamma.reset();
        const auto sol = dp_solve(0, 0.0, OracleSpec{}, p, rc.market);
        for (std::size_t d = 0; d < sol.value.size(); ++d) {
            const auto& v = sol.value[d];
            double prev_slope = -1.0;
            for (std::size_t i = 0; i + 1 < sol.w.size(); ++i) {
                const double slope = (v[i + 1] - v[i]) / (sol.w[i + 1] - sol.w[i]);
                CHECK(slope >= -1e-12);
                CHECK(slope <= 1.0 + 1e-9);
                CHECK(slope >= prev_slope - 1e-9);
                prev_slope = slope;
            }
        }
    }
}

TEST_CASE("Bermudan dominates European and exercise sets are up-closed", "[oracle][property]") {
    for (const auto& rc : testsupport::random_cases(8, 52, 6.0)) {
        auto p = rc.plan;
        p.gamma.reset();
        OracleSpec euro;
        euro.early_exercise = false;
        const auto b = dp_solve(0, 0.0, OracleSpec{}, p, rc.market);
        const auto e = dp_solve(0, 0.0, euro, p, rc.market);
        CHECK(b.value[0][0] >= e.value[0][0] - 1e-14);
        for (std::size_t d = 0; d < b.exercise.size(); ++d) {
            bool seen = false;
            for (std::size_t i = 0; i < b.w.size(); ++i) {
                if (b.exercise[d][i]) seen = true;
                else CHECK_FALSE(seen);
            }
        }
        for (std::size_t d = 0; d + 1 < e.exercise.size(); ++d)
            for (char x : e.exercise[d]) CHECK(x == 0);
    }
}

TEST_CASE("European oracle matches the Monte Carlo underpin", "[oracle]") {
    const auto m = testsupport::benchmark_market();
    auto p = testsupport::benchmark_plan(10.0);
    p.c = 0.2;
    OracleSpec euro;
    euro.early_exercise = false;
    const auto v = dp_value(0, 0.0, euro, p, m);
    const auto mc = price_underpin_mc(McSpec{}, p, m);
    CHECK(std::abs(v.value - mc.value) <= 3.0 * std::hypot(mc.std_error, v.std_error));
    OracleSpec gh = euro;
    gh.quadrature = Quadrature::GaussHermite;
    CHECK_THAT(dp_value(0, 0.0, gh, p, m).value, WithinAbs(v.value, 2e-5));
}

TEST_CASE("no exercise at or before the last infinite-boundary date", "[oracle][property]") {
    auto p = testsupport::benchmark_plan(8.0);
    const auto m = testsupport::benchmark_market();
    p.c = 0.2;
    const auto bc = classify_discrete(p, m);
    REQUIRE(bc.regime == Regime::PartiallyInfinite);
    REQUIRE(bc.t_star.has_value());
    const auto sol = dp_solve(0, 0.0, OracleSpec{}, p, m);
    bool later_exercise = false;
    for (int t = 0; t <= 8; ++t) {
        const auto& ex = sol.exercise[static_cast<std::size_t>(t)];
        const bool any = std::any_of(ex.begin(), ex.end(), [](char x) { return x != 0; });
        if (t <= *bc.t_star) CHECK_FALSE(any);
        else later_exercise = later_exercise || any;
    }
    CHECK(later_exercise);
}

TEST_CASE("Gauss-Hermite rule", "[oracle]") {
    for (int n : {16, 32, 40}) {
        const auto g = gauss_hermite(n);
        REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
        double m0 = 0, m1 = 0, m2 = 0, m4 = 0, m6 = 0;
        for (int k = 0; k < n; ++k) {
            const double x = g.nodes[k], w = g.weights[k];
            m0 += w;
            m1 += w * x;
            m2 += w * x * x;
            m4 += w * std::pow(x, 4);
            m6 += w * std::pow(x, 6);
        }
        CHECK_THAT(m0, WithinAbs(1.0, 1e-13));
        CHECK_THAT(m1, WithinAbs(0.0, 1e-13));
        CHECK_THAT(m2, WithinAbs(1.0, 1e-12));
        CHECK_THAT(m4, WithinAbs(3.0, 1e-11));
        CHECK_THAT(m6, WithinAbs(15.0, 1e-10));
        // E[e^{sZ}] = e^{s^2/2}
        double mgf = 0.0;
        for (int k = 0; k < n; ++k) mgf += g.weights[k] * std::exp(0.3 * g.nodes[k]);
        CHECK_THAT(mgf, WithinRel(std::exp(0.045), 1e-12));
    }
    CHECK_THROWS(gauss_hermite(0));
}
