#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "interplab/hardy.hpp"

using namespace interplab;

TEST_CASE("averaging operator reproduces the closed form on powers") {
    LogGrid g(1e-4, 1e4, 801);
    const double gamma = 0.3;
    SampledFunction f = SampledFunction::sample(g, [&](double t) { return std::pow(t, -gamma); });
    HardyResult r = apply_hardy(f);
    CHECK(r.boundary_mass > 0.0);
    for (std::size_t i = 0; i < g.size(); i += 37) {
        const double expect = std::pow(g.node(i), -gamma) / (1.0 - gamma);
        CHECK_THAT(r.values[i], Catch::Matchers::WithinRel(expect, 2e-4));
    }
}

TEST_CASE("adjoint operator reproduces the closed form on decaying powers") {
    LogGrid g(1e-4, 1e4, 801);
    const double gamma = 0.4;
    SampledFunction f = SampledFunction::sample(g, [&](double t) { return std::pow(t, -gamma); });
    HardyResult r = apply_adjoint(f);
    CHECK(r.boundary_mass > 0.0);
    for (std::size_t i = 0; i < g.size(); i += 37) {
        const double expect = std::pow(g.node(i), -gamma) / gamma;
        CHECK_THAT(r.values[i], Catch::Matchers::WithinRel(expect, 2e-4));
    }
}

TEST_CASE("calderon sum is the pointwise sum of both operators") {
    LogGrid g(1e-3, 1e3, 301);
    SampledFunction f = SampledFunction::indicator(g, 0.1, 10.0);
    HardyResult p = apply_hardy(f), q = apply_adjoint(f), s = apply_calderon(f);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK_THAT(s.values[i], Catch::Matchers::WithinAbs(p.values[i] + q.values[i], 1e-14));
    CHECK_THAT(s.boundary_mass, Catch::Matchers::WithinAbs(p.boundary_mass + q.boundary_mass, 1e-14));
}

TEST_CASE("averaging an indicator decays like total mass over t") {
    LogGrid g(1e-3, 1e3, 301);
    SampledFunction f = SampledFunction::indicator(g, 0.0, 1.0);
    HardyResult r = apply_hardy(f);
    const double mass = integrate(f) + r.boundary_mass;
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(r.values[i] <= 1.0 + 1e-9);
        if (g.node(i) > 1.5)
            CHECK_THAT(r.values[i] * g.node(i), Catch::Matchers::WithinRel(mass, 1e-12));
    }
}

TEST_CASE("non-integrable continuations are rejected") {
    LogGrid g(1e-3, 1e3, 301);
    CHECK_THROWS_AS(
        apply_hardy(SampledFunction::sample(g, [](double t) { return std::pow(t, -1.2); })),
        std::domain_error);
    CHECK_THROWS_AS(apply_adjoint(SampledFunction::sample(g, [](double) { return 1.0; })),
                    std::domain_error);
    CHECK_THROWS_AS(
        apply_adjoint(SampledFunction::sample(g, [](double t) { return std::pow(t, 0.3); })),
        std::domain_error);
}

TEST_CASE("the two pairing routes agree at rounding level") {
    LogGrid g(1e-3, 1e3, 241);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_fn = [&] {
        std::vector<double> v(g.size());
        for (double& x : v) x = unif(rng);
        return SampledFunction(g, std::move(v));
    };
    for (int k = 0; k < 30; ++k) {
        const double res = duality_residual(random_fn(), random_fn());
        CHECK(res <= 1e-12);
    }
    LogGrid other(1e-2, 1e2, 241);
    CHECK_THROWS_AS(duality_residual(random_fn(), SampledFunction::zero(other)),
                    std::invalid_argument);
}

TEST_CASE("sharp constants and their domains") {
    CHECK_THAT(hardy_upper_lp(2.0), Catch::Matchers::WithinRel(2.0, 1e-15));
    CHECK_THAT(hardy_upper_lp(1.5), Catch::Matchers::WithinRel(3.0, 1e-15));
    CHECK_THROWS_AS(hardy_upper_lp(1.0), std::invalid_argument);

    CHECK_THAT(hardy_upper_weighted(2.0, 0.4), Catch::Matchers::WithinRel(2.0 / 0.6, 1e-15));
    CHECK_THROWS_AS(hardy_upper_weighted(2.0, 1.0), std::invalid_argument);

    CHECK_THAT(adjoint_upper_weighted(2.0, 0.0), Catch::Matchers::WithinRel(2.0, 1e-15));
    CHECK_THAT(adjoint_upper_weighted(3.0, 0.5), Catch::Matchers::WithinRel(2.0, 1e-15));
    CHECK_THROWS_AS(adjoint_upper_weighted(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(adjoint_upper_weighted(2.0, -1.0), std::invalid_argument);

    CHECK_THAT(calderon_upper_weighted(2.0, 0.0), Catch::Matchers::WithinRel(4.0, 1e-15));
}

TEST_CASE("extended norm accounts for off-grid continuations") {
    LogGrid g(1e-4, 1e4, 801);
    PhiSpace phi{RiSpace::lp(2.0), Weight::one()};
    const double gamma = 0.3;
    // continuous at t = 1, so the cell quadrature is clean and the checks
    // isolate the off-grid continuations
    SampledFunction f = SampledFunction::sample(
        g, [&](double t) { return t < 1.0 ? std::pow(t, -gamma) : std::pow(t, -5.0); });

    const double exact2 = 2.5 + 1.0 / 9.0;
    NormValue full = extended_lp_norm(phi, f);
    CHECK_THAT(full.value, Catch::Matchers::WithinRel(std::sqrt(exact2), 1e-3));
    CHECK(full.edge_bound > 0.0);
    CHECK_FALSE(full.extension_unstable);

    NormValue cut = extended_lp_norm(phi, f, false, true);
    const double missing = std::pow(g.t_min(), 0.4) / 0.4;
    CHECK_THAT(cut.value, Catch::Matchers::WithinRel(std::sqrt(exact2 - missing), 1e-3));
    CHECK(cut.value < full.value);

    CHECK_THROWS_AS(extended_lp_norm(PhiSpace{RiSpace::lorentz(2.0, 1.0), Weight::one()}, f),
                    std::invalid_argument);
}

TEST_CASE("norm estimates approach the sharp constants from below") {
    LogGrid g(1e-6, 1e6, 1501);
    PhiSpace l2{RiSpace::lp(2.0), Weight::one()};

    OpNormEstimate p = opnorm_lower(AveragingOp::Hardy, l2, near_extremal_family(AveragingOp::Hardy, l2, g));
    CHECK(p.lower_bound >= 0.95 * 2.0);
    CHECK(p.lower_bound <= 2.0 * 1.001);

    OpNormEstimate q = opnorm_lower(AveragingOp::Adjoint, l2,
                                    near_extremal_family(AveragingOp::Adjoint, l2, g));
    CHECK(q.lower_bound >= 0.95 * 2.0);
    CHECK(q.lower_bound <= 2.0 * 1.001);

    OpNormEstimate s = opnorm_lower(AveragingOp::Calderon, l2,
                                    near_extremal_family(AveragingOp::Calderon, l2, g));
    CHECK(s.lower_bound >= 3.5);
    CHECK(s.lower_bound <= 4.0 * 1.001);

    PhiSpace weighted{RiSpace::lp(2.0), Weight::power(0.4)};  // theta = 0.3
    OpNormEstimate pw = opnorm_lower(AveragingOp::Hardy, weighted,
                                     near_extremal_family(AveragingOp::Hardy, weighted, g));
    CHECK(pw.lower_bound >= 0.95 / 0.3);
    CHECK(pw.lower_bound <= (1.0 / 0.3) * 1.001);
}

TEST_CASE("degenerate families are reported") {
    LogGrid g(1e-2, 1e2, 101);
    PhiSpace phi{RiSpace::lp(2.0), Weight::one()};
    CHECK_THROWS_AS(opnorm_lower(AveragingOp::Hardy, phi, {}), std::invalid_argument);
    CHECK_THROWS_AS(opnorm_lower(AveragingOp::Hardy, phi, {SampledFunction::zero(g)}),
                    estimation_error);
}
