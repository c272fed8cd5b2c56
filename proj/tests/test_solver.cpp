#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "milp.hpp"
#include "solver.hpp"

using namespace wildgrid;

TEST_CASE("trivial LP and MIP solves") {
    SolverParams params;

    SUBCASE("min x s.t. x >= 3") {
        MilpModel m;
        int x = m.add_col(-kInf, kInf, 1.0, false);
        m.add_row({{x, 1.0}}, 3.0, kInf);
        auto out = MilpBackend::instance().solve_mip(m, params);
        CHECK(out.status == SolveStatus::Optimal);
        CHECK(out.objective == doctest::Approx(3.0));
    }

    SUBCASE("infeasible pair") {
        MilpModel m;
        int x = m.add_col(-kInf, kInf, 1.0, false);
        m.add_row({{x, 1.0}}, 1.0, kInf);
        m.add_row({{x, 1.0}}, -kInf, 0.0);
        auto out = MilpBackend::instance().solve_mip(m, params);
        CHECK(out.status == SolveStatus::Infeasible);
        CHECK_FALSE(out.feasible());
    }

    SUBCASE("copy-constraint dual") {
        // min 5z s.t. z = 1 -> dual 5
        MilpModel m;
        int z = m.add_col(-kInf, kInf, 5.0, false);
        int row = m.add_row({{z, 1.0}}, 1.0, 1.0);
        auto out = MilpBackend::instance().solve_lp(m, params);
        CHECK(out.status == SolveStatus::Optimal);
        CHECK(out.objective == doctest::Approx(5.0));
        CHECK(out.row_duals[row] == doctest::Approx(5.0));
    }

    SUBCASE("binary knapsack with objective offset") {
        MilpModel m;
        m.obj_offset = 10.0;
        int a = m.add_col(0, 1, -3.0, true);
        int b = m.add_col(0, 1, -2.0, true);
        m.add_row({{a, 1.0}, {b, 1.0}}, -kInf, 1.0);
        auto out = MilpBackend::instance().solve_mip(m, params);
        CHECK(out.objective == doctest::Approx(7.0));
        CHECK(out.primal[a] == doctest::Approx(1.0));
        CHECK(out.dual_bound == doctest::Approx(7.0).epsilon(1e-5));
    }

    SUBCASE("unbounded model is reported") {
        MilpModel m;
        m.add_col(-kInf, kInf, 1.0, false);
        auto out = MilpBackend::instance().solve_mip(m, params);
        CHECK(out.status == SolveStatus::Unbounded);
    }

    SUBCASE("solve_lp rejects integrality") {
        MilpModel m;
        m.add_col(0, 1, 1.0, true);
        CHECK_THROWS_AS(MilpBackend::instance().solve_lp(m, params), BackendError);
    }
}

TEST_CASE("relaxation bound: LP below MIP") {
    // min -x - y s.t. x + 2y <= 2, 2x + y <= 2, binaries: LP optimum fractional
    MilpModel m;
    int x = m.add_col(0, 1, -1.0, true);
    int y = m.add_col(0, 1, -1.0, true);
    m.add_row({{x, 1.0}, {y, 2.0}}, -kInf, 2.0);
    m.add_row({{x, 2.0}, {y, 1.0}}, -kInf, 2.0);
    SolverParams params;
    auto mip = MilpBackend::instance().solve_mip(m, params);
    MilpModel relaxed = m;
    relaxed.relax_all_integrality();
    auto lp = MilpBackend::instance().solve_lp(relaxed, params);
    CHECK(lp.objective <= mip.objective + 1e-9);
    CHECK(lp.objective == doctest::Approx(-4.0 / 3.0));
    CHECK(mip.objective == doctest::Approx(-1.0));
}

TEST_CASE("QP master: projection onto a half-space") {
    // min x^2 + y^2 s.t. x + y >= 2 -> (1, 1)
    std::vector<double> P{2, 0, 0, 2}, q{0, 0}, G{-1, -1}, h{-2};
    auto res = MilpBackend::instance().solve_qp(2, P, q, G, h, {}, {});
    REQUIRE(res.ok);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-6));

    SUBCASE("simplex-constrained quadratic") {
        // min ||a||^2 over the simplex -> uniform weights
        std::vector<double> P2{2, 0, 0, 2}, q2{0, 0}, G2{-1, 0, 0, -1}, h2{0, 0};
        std::vector<double> A{1, 1}, b{1};
        auto r2 = MilpBackend::instance().solve_qp(2, P2, q2, G2, h2, A, b);
        REQUIRE(r2.ok);
        CHECK(r2.x[0] == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(r2.x[1] == doctest::Approx(0.5).epsilon(1e-6));
    }
}

TEST_CASE("weak duality spot check on a ranged-row model") {
    // min x + 2y s.t. 1 <= x + y <= 4, x - y = 0.5, bounds free
    MilpModel m;
    int x = m.add_col(-kInf, kInf, 1.0, false);
    int y = m.add_col(-kInf, kInf, 2.0, false);
    m.add_row({{x, 1.0}, {y, 1.0}}, 1.0, 4.0);
    int eq = m.add_row({{x, 1.0}, {y, -1.0}}, 0.5, 0.5);
    SolverParams params;
    auto out = MilpBackend::instance().solve_lp(m, params);
    REQUIRE(out.status == SolveStatus::Optimal);
    // x + y = 1 active, x - y = 0.5 -> x = 0.75, y = 0.25
    CHECK(out.objective == doctest::Approx(1.25));
    CHECK(!std::isnan(out.row_duals[eq]));
}
