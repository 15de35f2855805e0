#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "interplab/weight_classes.hpp"

using namespace interplab;
using Verdict = ConstantEstimate::Verdict;

TEST_CASE("hardy class constant of the unit weight is 1/(p-1)") {
    for (double p : {1.5, 2.0, 3.0}) {
        ConstantEstimate c = mp_constant(Weight::one(), p);
        REQUIRE(c.finite());
        CHECK_THAT(c.value, Catch::Matchers::WithinRel(1.0 / (p - 1.0), 1e-9));
    }
}

TEST_CASE("hardy class constants of power weights hit their closed forms") {
    ConstantEstimate c2 = mp_constant(Weight::power(0.5), 2.0);
    REQUIRE(c2.finite());
    CHECK_THAT(c2.value, Catch::Matchers::WithinRel(4.0, 1e-9));

    ConstantEstimate c3 = mp_constant(Weight::power(1.0), 3.0);
    REQUIRE(c3.finite());
    CHECK_THAT(c3.value, Catch::Matchers::WithinRel(4.0, 1e-9));
}

TEST_CASE("boundary powers are flagged as divergent with a reason") {
    for (double p : {1.5, 2.0, 3.0}) {
        ConstantEstimate c = mp_constant(Weight::power(p - 1.0), p);
        CHECK(c.verdict == Verdict::Diverging);
        CHECK(c.reason.find("diverges") != std::string::npos);
    }
    // steep head kills the dual factor while the tail is harmless
    ConstantEstimate h = mp_constant(Weight::piecewise_power(1.5, 0.0), 2.0);
    CHECK(h.verdict == Verdict::Diverging);
    CHECK(h.reason.find("near 0") != std::string::npos);
    CHECK_THROWS_AS(mp_constant(Weight::one(), 1.0), std::invalid_argument);
}

TEST_CASE("endpoint constants match power-weight closed forms") {
    CHECK_THAT(m1_hardy_constant(Weight::power(-0.5)).value,
               Catch::Matchers::WithinRel(2.0, 1e-9));
    CHECK_THAT(m1_hardy_constant(Weight::one()).value, Catch::Matchers::WithinRel(1.0, 1e-9));
    CHECK(m1_hardy_constant(Weight::power(-1.0)).verdict == Verdict::Diverging);

    CHECK_THAT(m1_constant(Weight::power(-0.5)).value, Catch::Matchers::WithinRel(2.0, 1e-9));
    CHECK_THAT(m1_constant(Weight::power(-2.0)).value, Catch::Matchers::WithinRel(0.5, 1e-9));
    CHECK(m1_constant(Weight::one()).verdict == Verdict::Diverging);
}

TEST_CASE("dual-side constant goes through the conjugate transform") {
    ConstantEstimate c = mup_constant(Weight::power(-0.5), 2.0);
    REQUIRE(c.finite());
    CHECK_THAT(c.value, Catch::Matchers::WithinRel(4.0, 1e-9));

    ConstantEstimate e1 = mup_constant(Weight::power(-0.5), 1.0);
    ConstantEstimate e2 = m1_hardy_constant(Weight::power(-0.5));
    CHECK_THAT(e1.value, Catch::Matchers::WithinRel(e2.value, 1e-12));
    CHECK_THROWS_AS(mup_constant(Weight::one(), 0.5), std::invalid_argument);
}

TEST_CASE("one-sided constant of the unit weight is exactly 1/4 at p = 2") {
    ConstantEstimate c = apminus_constant(Weight::one(), 2.0);
    REQUIRE(c.finite());
    CHECK_THAT(c.value, Catch::Matchers::WithinRel(0.25, 1e-12));
}

TEST_CASE("one-sided constants are dilation invariant") {
    for (double lam : {0.1, 10.0}) {
        ConstantEstimate base = apminus_constant(Weight::power(-0.5), 2.0);
        ConstantEstimate moved = apminus_constant(Weight::power(-0.5).dilate(lam), 2.0);
        CHECK_THAT(moved.value, Catch::Matchers::WithinRel(base.value, 1e-9));
    }
    Weight pw = Weight::piecewise_power(-0.5, -1.0);
    ConstantEstimate base = apminus_constant(pw, 2.0);
    ConstantEstimate moved = apminus_constant(pw.dilate(3.0), 2.0);
    CHECK_THAT(moved.value, Catch::Matchers::WithinRel(base.value, 5e-3));
}

TEST_CASE("classification separates the one-sided class from the operator classes") {
    const Weight w = Weight::piecewise_power(-0.5, -1.0);
    WeightClassReport rep = classify(w, 2.0);

    CHECK(rep.p_side.finite());
    CHECK(rep.q_side.verdict == Verdict::Diverging);
    CHECK_FALSE(rep.calderon_class);
    CHECK(rep.one_sided.finite());
    CHECK(rep.consistency_one_sided_in_p_side);
    CHECK_THAT(rep.openness_probe_q, Catch::Matchers::WithinRel(1.95, 1e-12));
    CHECK(rep.openness_probe.finite());

    // the local constant is already converged at the default grid depth
    TripleGridConfig deeper;
    deeper.refine_rounds = 5;
    ConstantEstimate refined = apminus_constant(w, 2.0, deeper);
    CHECK_THAT(refined.value, Catch::Matchers::WithinRel(rep.one_sided.value, 0.02));
}

TEST_CASE("calderon class holds for well-behaved weights") {
    WeightClassReport rep = classify(Weight::power(0.3), 2.0);
    CHECK(rep.p_side.finite());
    CHECK(rep.q_side.finite());
    CHECK(rep.calderon_class);
    CHECK(rep.one_sided.finite());
    CHECK(rep.one_sided_dual.finite());
}

TEST_CASE("divergence detector needs sustained growth") {
    std::vector<std::pair<double, double>> growing{{1.0, 1.0}, {2.0, 15.0}, {3.0, 200.0}, {4.0, 3000.0}};
    CHECK(sweep_diverges(growing, 10.0, 3));

    std::vector<std::pair<double, double>> flat{{1.0, 5.0}, {2.0, 5.1}, {3.0, 5.2}, {4.0, 5.2}};
    CHECK_FALSE(sweep_diverges(flat, 10.0, 3));

    std::vector<std::pair<double, double>> spike{{1.0, 1.0}, {2.0, 100.0}, {3.0, 101.0}, {4.0, 101.0}};
    CHECK_FALSE(sweep_diverges(spike, 10.0, 3));

    std::vector<std::pair<double, double>> tiny{{1.0, 1.0}, {2.0, 100.0}};
    CHECK_FALSE(sweep_diverges(tiny, 10.0, 3));
}
