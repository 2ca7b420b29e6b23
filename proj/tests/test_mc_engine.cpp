#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pensionopt/closed_form.hpp"
#include "pensionopt/frontier.hpp"
#include "pensionopt/mc_engine.hpp"
#include "support.hpp"

using namespace pensionopt;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

McSpec small_spec(std::size_t n = 20000) {
    McSpec s;
    s.n_paths = n;
    return s;
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

TEST_CASE("spec validation", "[mc][errors]") {
    McSpec s;
    REQUIRE_NOTHROW(validate(s));
    s.n_paths = 1;
    CHECK_THROWS_WITH(validate(s), ContainsSubstring("mc.n_paths"));
    s.n_paths = 1001;
    CHECK_THROWS_WITH(validate(s), ContainsSubstring("even"));
    s.antithetic = false;
    CHECK_NOTHROW(validate(s));
    s.steps_per_year = 0;
    CHECK_THROWS_WITH(validate(s), ContainsSubstring("mc.steps_per_year"));
    s.steps_per_year = 1;
    s.basis_degree = 0;
    CHECK_THROWS_WITH(validate(s), ContainsSubstring("mc.basis_degree"));
    s.basis_degree = 7;
    CHECK_THROWS(validate(s));

    const auto m = testsupport::benchmark_market();
    CHECK_THROWS(simulate(small_spec(), testsupport::benchmark_plan(10.5), m, 0.0));
    CHECK_THROWS(simulate(small_spec(), testsupport::benchmark_plan(10.0), m, -1.0));
    CHECK_THROWS(simulate(small_spec(), testsupport::benchmark_plan(10.0), m, 0.0, 10));
}

TEST_CASE("simulated paths", "[mc]") {
    const auto p = testsupport::benchmark_plan(10.0);
    auto m = testsupport::benchmark_market();

    SECTION("zero volatility gives the risk-free factor") {
        m.sigma_s = 0.0;
        const auto b = simulate(small_spec(100), p, m, 0.0);
        for (std::size_t i = 0; i < b.n_paths; ++i)
            for (int k = 0; k < b.horizon; ++k) CHECK_THAT(b.growth_at(i, k), WithinRel(std::exp(0.04), 1e-14));
    }
    SECTION("discounted stock is a martingale") {
        for (int sub : {1, 4}) {
            auto spec = small_spec(100000);
            spec.steps_per_year = sub;
            const auto b = simulate(spec, p, m, 0.0);
            for (int k : {0, 5, 9}) {
                std::vector<double> x(b.n_paths);
                for (std::size_t i = 0; i < b.n_paths; ++i) x[i] = std::exp(-m.r) * b.growth_at(i, k);
                const auto st = sample_stats(x, true);
                CHECK(std::abs(st.mean - 1.0) <= 3.0 * st.std_error);
            }
        }
    }
    SECTION("wealth follows the contribution recursion") {
        const auto b = simulate(small_spec(50), p, m, 2.0, 3);
        CHECK(b.horizon == 7);
        for (std::size_t i = 0; i < b.n_paths; ++i) {
            double w = 2.0;
            CHECK(b.wealth_at(i, 0) == 2.0);
            for (int k = 0; k < b.horizon; ++k) {
                w = (w + p.c * b.salary_at(i, 3 + k)) * b.growth_at(i, k);
                CHECK_THAT(b.wealth_at(i, k + 1), WithinRel(w, 1e-13));
            }
            CHECK_THAT(b.salary_at(i, 2), WithinRel(std::exp(0.08), 1e-14));
        }
    }
    SECTION("antithetic pairs mirror the equity driver") {
        const auto b = simulate(small_spec(10), p, m, 0.0);
        const double drift = m.r - 0.5 * m.sigma_s * m.sigma_s;
        for (std::size_t i = 0; i < b.n_paths; i += 2)
            for (int k = 0; k < b.horizon; ++k)
                CHECK_THAT(std::log(b.growth_at(i, k)) + std::log(b.growth_at(i + 1, k)), WithinAbs(2.0 * drift, 1e-12));
    }
    SECTION("perfectly hedged salary leaves a deterministic ratio") {
        m.rho = 1.0;
        m.sigma_l = m.sigma_s;
        m.mu_l = m.r;
        const auto b = simulate(small_spec(200), p, m, 0.0, 0, SalaryVariant::StochasticHedgeable);
        REQUIRE(b.stochastic_salary);
        for (int k = 1; k <= b.horizon; ++k) {
            const double y0 = b.wealth_at(0, k) / b.salary_at(0, k);
            for (std::size_t i = 1; i < b.n_paths; ++i)
                CHECK_THAT(b.wealth_at(i, k) / b.salary_at(i, k), WithinRel(y0, 1e-10));
        }
    }
    SECTION("results do not depend on the worker count") {
        auto one = small_spec(2000);
        one.workers = 1;
        auto four = one;
        four.workers = 4;
        const auto a = simulate(one, p, m, 0.0, 0, SalaryVariant::StochasticHedgeable);
        const auto b = simulate(four, p, m, 0.0, 0, SalaryVariant::StochasticHedgeable);
        CHECK(a.wealth == b.wealth);
        CHECK(a.salary == b.salary);
        const auto la = price_bermudan_lsmc(one, testsupport::benchmark_plan(10.0), m);
        const auto lb = price_bermudan_lsmc(four, testsupport::benchmark_plan(10.0), m);
        CHECK(la.option.value == lb.option.value);
        CHECK(la.option.std_error == lb.option.std_error);
    }
}

TEST_CASE("sample statistics", "[mc]") {
    const std::vector<double> x = {1.0, 3.0, 2.0, 2.0, 0.0, 4.0, 5.0, 1.0};
    const auto plain = sample_stats(x, false);
    CHECK_THAT(plain.mean, WithinAbs(2.25, 1e-15));
    const auto pairs = sample_stats(x, true);  // pair means 2, 2, 2, 3
    CHECK_THAT(pairs.mean, WithinAbs(2.25, 1e-15));
    CHECK_THAT(pairs.std_error, WithinAbs(std::sqrt(0.25 / 4.0), 1e-15));
}

TEST_CASE("discrete underpin", "[mc][published]") {
    const auto m = testsupport::benchmark_market();
    McSpec spec;  // 200k antithetic paths

    const auto u30 = price_underpin_mc(spec, testsupport::benchmark_plan(30.0), m);
    CHECK(u30.method == Method::MC);
    CHECK(std::abs(u30.value - 0.1455) <= 3.0 * combined(u30.std_error, 0.0048));
    const auto u10 = price_underpin_mc(spec, testsupport::benchmark_plan(10.0), m);
    CHECK(std::abs(u10.value - 0.0039) <= 3.0 * combined(u10.std_error, 0.0011));

    auto tiny = testsupport::benchmark_plan(30.0);
    tiny.c = 1e-12;
    CHECK(price_underpin_mc(small_spec(), tiny, m).value == 0.0);
}

TEST_CASE("put form agrees with the call form", "[mc][property]") {
    const auto m = testsupport::benchmark_market();
    for (double T : {10.0, 30.0}) {
        const auto p = testsupport::benchmark_plan(T);
        const auto call = price_underpin_mc(small_spec(100000), p, m, UnderpinForm::Call);
        const auto put = price_underpin_mc(small_spec(100000), p, m, UnderpinForm::PutParity);
        CHECK(std::abs(call.value - put.value) <= 3.0 * combined(call.std_error, put.std_error));
    }
}

TEST_CASE("three-term cost at a fixed switching year", "[mc][property]") {
    const auto p = testsupport::benchmark_plan(30.0);
    const auto m = testsupport::benchmark_market();
    const double w0 = 1.5;
    const auto b = simulate(small_spec(100000), p, m, w0);
    const double k_T_pv = std::exp(-m.r * p.T) * p.T * accrual_value(p) * std::exp(m.mu_l * (p.T - 1.0));
    for (int tau : {0, 5, 12, 29, 30}) {
        std::vector<double> diff(b.n_paths);
        for (std::size_t i = 0; i < b.n_paths; ++i) {
            double contrib = 0.0;
            for (int u = 0; u < tau; ++u) contrib += std::exp(-m.r * u) * p.c * b.salary_at(i, u);
            const double a_tau = discrete_strike(tau, b.salary_at(i, tau - 1), p, m);
            const double w_tau = b.wealth_at(i, tau);
            const double disc = std::exp(-m.r * tau);
            const double three_term = contrib + (k_T_pv - disc * a_tau) + disc * std::max(a_tau - w_tau, 0.0);
            const double parity = k_T_pv + disc * std::max(w_tau - a_tau, 0.0) - w0;
            diff[i] = three_term - parity;
        }
        const auto st = sample_stats(diff, true);
        CHECK(std::abs(st.mean) <= 3.0 * st.std_error + 1e-12);
    }
}

TEST_CASE("Bermudan underpin by least squares", "[mc][published]") {
    const auto m = testsupport::benchmark_market();
    McSpec spec;

    const auto b30 = price_bermudan_lsmc(spec, testsupport::benchmark_plan(30.0), m);
    CHECK(b30.option.method == Method::LSMC);
    CHECK(std::abs(b30.option.value - 0.3752) <= 3.0 * combined(b30.option.std_error, 0.0014));
    CHECK_THAT(b30.db_pv, WithinAbs(6.8024, 5e-5));
    CHECK_THAT(b30.full_cost, WithinAbs(b30.db_pv + b30.option.value, 1e-12));
    CHECK(b30.diagnostics.years.size() == 31);

    const auto b10 = price_bermudan_lsmc(spec, testsupport::benchmark_plan(10.0), m);
    CHECK(std::abs(b10.option.value - 0.0099) <= 3.0 * combined(b10.option.std_error, 0.0001));

    const auto u30 = price_underpin_mc(spec, testsupport::benchmark_plan(30.0), m);
    CHECK(b30.option.value >= u30.value - 3.0 * combined(b30.option.std_error, u30.std_error));
}

TEST_CASE("one period before retirement matches Black-Scholes", "[mc]") {
    const auto p = testsupport::benchmark_plan(30.0);
    const auto m = testsupport::benchmark_market();
    for (double w0 : {15.0, 20.0, 21.0, 22.0, 26.0}) {
        const auto lsmc = price_bermudan_lsmc(McSpec{}, p, m, 29, w0);
        const auto bs = bs_one_period(w0, p, m);
        CHECK(std::abs(lsmc.option.value - bs.v) <= 3.0 * lsmc.option.std_error + 1e-10);
    }
}

TEST_CASE("LSMC value is monotone and Lipschitz in initial wealth", "[mc][property]") {
    const auto p = testsupport::benchmark_plan(5.0);
    const auto m = testsupport::benchmark_market();
    const McSpec spec = small_spec(100000);
    const double ws[] = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0};
    std::vector<PriceEstimate> v;
    for (double w : ws) v.push_back(price_bermudan_lsmc(spec, p, m, 0, w).option);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        CHECK(v[k + 1].value >= v[k].value);
        CHECK(v[k + 1].value - v[k].value <= (ws[k + 1] - ws[k]) + 3.0 * v[k + 1].std_error);
    }
}

TEST_CASE("degenerate regime never exercises early", "[mc][property]") {
    auto p = testsupport::benchmark_plan(5.0);
    const auto m = testsupport::benchmark_market();
    p.c = 0.4;
    REQUIRE(discrete_degenerate_condition(p, m));
    McSpec spec;
    const auto b = price_bermudan_lsmc(spec, p, m);
    const auto u = price_underpin_mc(spec, p, m);
    double early = 0.0;
    for (std::size_t d = 0; d + 1 < b.diagnostics.years.size(); ++d) early += b.diagnostics.exercise_fraction[d];
    const double n = static_cast<double>(spec.n_paths);
    CHECK(early <= 3.0 * std::sqrt(std::max(early, 1.0 / n) / n));
    CHECK(std::abs(b.option.value - u.value) <= 3.0 * combined(b.option.std_error, u.std_error));
}

TEST_CASE("singular regressions fall back to the mean continuation", "[mc][errors]") {
    auto p = testsupport::benchmark_plan(10.0);
    auto m = testsupport::benchmark_market();
    m.sigma_s = 0.0;
    m.sigma_l = 0.0;
    p.c = 0.5;
    const auto b = price_bermudan_lsmc(small_spec(1000), p, m, 0, 5.0);
    const auto& fb = b.diagnostics.fallback;
    CHECK(std::any_of(fb.begin(), fb.end(), [](char f) { return f != 0; }));
    CHECK(std::isfinite(b.option.value));
    CHECK(b.option.std_error == 0.0);
}
