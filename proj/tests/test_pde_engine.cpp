#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "pensionopt/frontier.hpp"
#include "pensionopt/pde_engine.hpp"
#include "support.hpp"

using namespace pensionopt;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double price(bool bermudan, SalaryVariant v, const PlanParams& p, const MarketParams& m, GridSpec g = {}) {
    const auto model = build_ratio_model(p, m, v);
    const auto s = bermudan ? solve_bermudan(model, g, p, m) : solve_european(model, g, p, m);
    REQUIRE(s.converged);
    return s.value_at(0.0);
}

GridSpec coarse() {
    GridSpec g;
    g.n_y = 200;
    g.n_t = 400;
    return g;
}

// Node-wise shape checks shared by the property cases.
void check_shape(const ValueSurface& s, const ValueSurface* european, bool time_monotone) {
    const double tol = 1e-7;
    const std::size_t ny = s.y.size();
    for (std::size_t j = 0; j < s.times.size(); ++j) {
        const auto v = s.level(j);
        const double k = s.strike(s.times[j]);
        double prev_slope = -1.0;
        for (std::size_t i = 0; i < ny; ++i) {
            CHECK(v[i] >= -tol);
            if (s.early_exercise) CHECK(v[i] >= std::max(s.y[i] - k, 0.0) - 1e-6);
            if (european) CHECK(v[i] >= european->at(j, i) - tol);
            if (i + 1 < ny) {
                const double h = s.y[i + 1] - s.y[i];
                const double slope = (v[i + 1] - v[i]) / h;
                CHECK(slope >= -tol);
                CHECK(v[i + 1] - v[i] <= h * (1.0 + 1e-6) + tol);
                CHECK(slope >= prev_slope - 1e-6);
                prev_slope = slope;
            }
            if (time_monotone && j + 1 < s.times.size()) CHECK(v[i] >= s.at(j + 1, i) - tol);
        }
    }
}

}  // namespace

TEST_CASE("ratio model coefficients", "[pde]") {
    auto p = testsupport::benchmark_plan(30.0);
    auto m = testsupport::benchmark_market();

    const auto hedged = build_ratio_model(p, m, SalaryVariant::StochasticHedgeable);
    CHECK_THAT(hedged.sigma_y, WithinAbs(std::sqrt(0.0241), 1e-15));
    CHECK_THAT(hedged.sigma_y, WithinAbs(0.15524, 5e-6));
    CHECK(hedged.drift_coeff == 0.0);
    CHECK(hedged.discount_coeff == 0.0);
    CHECK(hedged.source_coeff == 0.125);

    auto perfect = m;
    perfect.rho = 1.0;
    perfect.sigma_l = perfect.sigma_s;
    CHECK(build_ratio_model(p, perfect, SalaryVariant::StochasticHedgeable).sigma_y == 0.0);

    auto no_salary_vol = m;
    no_salary_vol.sigma_l = 0.0;
    const auto a = build_ratio_model(p, m, SalaryVariant::DeterministicSalary);
    const auto b = build_ratio_model(p, no_salary_vol, SalaryVariant::StochasticHedgeable);
    CHECK(a.sigma_y == b.sigma_y);
    CHECK(a.drift_coeff == b.drift_coeff);
    CHECK(a.discount_coeff == b.discount_coeff);
    CHECK(a.source_coeff == b.source_coeff);

    m.r = 0.06;
    const auto det = build_ratio_model(p, m, SalaryVariant::DeterministicSalary);
    CHECK_THAT(det.drift_coeff, WithinAbs(0.02, 1e-15));
    CHECK_THAT(det.discount_coeff, WithinAbs(0.02, 1e-15));
    p.gamma = 0.03;
    CHECK(build_ratio_model(p, m, SalaryVariant::DeterministicSalary).strike.gamma == 0.03);
}

TEST_CASE("grid resolution and validation", "[pde][errors]") {
    const auto p = testsupport::benchmark_plan(30.0);
    const auto m = testsupport::benchmark_market();
    const auto model = build_ratio_model(p, m, SalaryVariant::DeterministicSalary);
    const auto g = resolve_grid(GridSpec{}, p, m, model);
    CHECK(g.n_t == 3000);
    CHECK(g.n_y == 800);
    CHECK_THAT(g.y_max, WithinRel(5.0 * std::max(7.08, 3.75 * std::exp(1.2)), 1e-12));

    auto bad = [&](auto mutate, const char* field) {
        GridSpec x;
        mutate(x);
        CHECK_THROWS_WITH(resolve_grid(x, p, m, model), ContainsSubstring(field));
    };
    bad([](GridSpec& x) { x.y_max = 5.0; }, "grid.y_max");
    bad([](GridSpec& x) { x.n_y = 49; }, "grid.n_y");
    bad([](GridSpec& x) { x.n_t = 119; }, "grid.n_t");
    bad([](GridSpec& x) { x.penalty = 1e5; }, "grid.penalty");
    bad([](GridSpec& x) { x.tol = 0.0; }, "grid.tol");
    bad([](GridSpec& x) { x.max_iter = 0; }, "grid.max_iter");
    bad([](GridSpec& x) { x.stretch = -1.0; }, "grid.stretch");

    auto broken = model;
    broken.discount_coeff += 0.01;
    CHECK_THROWS(solve_bermudan(broken, GridSpec{}, p, m));
}

TEST_CASE("terminal level is the call payoff", "[pde]") {
    const auto p = testsupport::benchmark_plan(10.0);
    const auto m = testsupport::benchmark_market();
    const auto model = build_ratio_model(p, m, SalaryVariant::DeterministicSalary);
    for (const auto& s : {solve_bermudan(model, coarse(), p, m), solve_european(model, coarse(), p, m)}) {
        const auto last = s.level(s.times.size() - 1);
        for (std::size_t i = 0; i < s.y.size(); ++i)
            CHECK(last[i] == std::max(s.y[i] - model.strike(10.0), 0.0));
        CHECK(s.times.front() == 0.0);
        CHECK_THAT(s.times.back(), WithinAbs(10.0, 1e-12));
    }
}

TEST_CASE("published continuous prices at the default grid", "[pde][published]") {
    const auto m = testsupport::benchmark_market();
    const auto p = testsupport::benchmark_plan(30.0);
    CHECK_THAT(price(true, SalaryVariant::DeterministicSalary, p, m), WithinAbs(0.3355, 0.005));
    CHECK_THAT(price(true, SalaryVariant::StochasticHedgeable, p, m), WithinAbs(0.3492, 0.005));
    CHECK_THAT(price(false, SalaryVariant::DeterministicSalary, p, m), WithinAbs(0.1199, 0.002));

    auto pg = p;
    pg.gamma = 0.06;
    CHECK_THAT(price(true, SalaryVariant::DeterministicSalary, pg, m), WithinAbs(0.5811, 0.008));

    auto ms = m;
    ms.sigma_l = 0.09;
    CHECK_THAT(price(false, SalaryVariant::StochasticHedgeable, p, ms), WithinAbs(0.2001, 0.003));
}

TEST_CASE("zero ratio volatility transports the ratio deterministically", "[pde]") {
    auto p = testsupport::benchmark_plan(30.0);
    p.c = 0.3;
    auto m = testsupport::benchmark_market();
    m.rho = 1.0;
    m.sigma_l = m.sigma_s;
    const auto model = build_ratio_model(p, m, SalaryVariant::StochasticHedgeable);
    REQUIRE(model.sigma_y == 0.0);
    const auto s = solve_european(model, GridSpec{}, p, m);
    const double kT = model.strike(30.0);
    for (double y0 : {0.0, 1.0, 5.0}) {
        const double expected = std::max(y0 + p.c * p.T - kT, 0.0);
        CHECK_THAT(s.value_at(y0), WithinAbs(expected, 2e-3));
    }
}

TEST_CASE("value surfaces satisfy the shape properties", "[pde][property]") {
    for (const auto& rc : testsupport::random_cases(6, 41, 20.0)) {
        for (auto variant : {SalaryVariant::StochasticHedgeable, SalaryVariant::DeterministicSalary}) {
            const auto model = build_ratio_model(rc.plan, rc.market, variant);
            const auto e = solve_european(model, coarse(), rc.plan, rc.market);
            const auto b = solve_bermudan(model, coarse(), rc.plan, rc.market);
            REQUIRE(b.converged);
            check_shape(e, nullptr, variant == SalaryVariant::StochasticHedgeable);
            check_shape(b, &e, variant == SalaryVariant::StochasticHedgeable);
        }
    }
}

TEST_CASE("degenerate regime: Bermudan equals European", "[pde][property]") {
    auto p = testsupport::benchmark_plan(30.0);
    const auto m = testsupport::benchmark_market();
    p.c = 0.6;
    REQUIRE(classify_continuous(p, m).regime == Regime::DegenerateEuropean);
    const double b = price(true, SalaryVariant::StochasticHedgeable, p, m);
    const double e = price(false, SalaryVariant::StochasticHedgeable, p, m);
    CHECK(b - e < 1e-4);
    CHECK(b - e >= -1e-9);

    auto pr = testsupport::benchmark_plan(20.0);
    auto mr = testsupport::benchmark_market();
    mr.r = 0.0;
    mr.mu_l = 0.0;
    pr.c = 0.3;
    REQUIRE(classify_continuous(pr, mr, SalaryVariant::DeterministicSalary).regime == Regime::DegenerateEuropean);
    CHECK(price(true, SalaryVariant::DeterministicSalary, pr, mr) -
              price(false, SalaryVariant::DeterministicSalary, pr, mr) <
          1e-4);
}

TEST_CASE("truncation of the ratio domain is immaterial", "[pde]") {
    const auto p = testsupport::benchmark_plan(30.0);
    const auto m = testsupport::benchmark_market();
    const auto model = build_ratio_model(p, m, SalaryVariant::DeterministicSalary);
    const auto base = resolve_grid(GridSpec{}, p, m, model);
    GridSpec wide = base;
    wide.y_max = 2.0 * base.y_max;
    wide.n_y = 2 * base.n_y;
    for (bool bermudan : {true, false}) {
        const double a = price(bermudan, SalaryVariant::DeterministicSalary, p, m, base);
        const double b = price(bermudan, SalaryVariant::DeterministicSalary, p, m, wide);
        CHECK(std::abs(a - b) < 1e-4);
    }
}

TEST_CASE("grid refinement converges", "[pde]") {
    const auto p = testsupport::benchmark_plan(20.0);
    const auto m = testsupport::benchmark_market();
    std::vector<double> prices;
    for (int k = 0; k < 4; ++k) {
        GridSpec g;
        g.n_y = 200 << k;
        g.n_t = (500 << k);
        prices.push_back(price(true, SalaryVariant::DeterministicSalary, p, m, g));
    }
    const double d1 = std::abs(prices[1] - prices[0]);
    const double d2 = std::abs(prices[2] - prices[1]);
    const double d3 = std::abs(prices[3] - prices[2]);
    CHECK(d2 < 0.5 * d1);
    CHECK(d3 < 0.5 * d2);
    CHECK(d3 < 1e-3);
}

TEST_CASE("penalty iteration limits are reported", "[pde][errors]") {
    const auto p = testsupport::benchmark_plan(20.0);
    const auto m = testsupport::benchmark_market();
    const auto model = build_ratio_model(p, m, SalaryVariant::DeterministicSalary);
    GridSpec g = coarse();
    g.max_iter = 1;
    g.tol = 1e-14;
    const auto s = solve_bermudan(model, g, p, m);
    CHECK_FALSE(s.converged);
    CHECK(s.diagnostics.failed_steps > 0);
    CHECK(s.diagnostics.max_iterations_in_step == 1);

    const auto ok = solve_bermudan(model, coarse(), p, m);
    CHECK(ok.converged);
    CHECK(ok.diagnostics.failed_steps == 0);
    CHECK(ok.diagnostics.total_iterations >= 400);
}
