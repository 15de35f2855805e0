#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "interplab/couples.hpp"

using namespace interplab;

namespace {

Vector random_vec(Eigen::Index d, std::mt19937_64& rng, bool real = false) {
    std::normal_distribution<double> nd;
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = Complex(nd(rng), real ? 0.0 : nd(rng));
    return v;
}

// 1D oracle for the l1 / weighted-max couple: clamp at level m, optimum at
// a kink of the piecewise-linear cost.
double gfd_oracle(const Vector& x, double t, double w0, double w1) {
    const double ws[2] = {w0, w1};
    std::vector<double> kinks{0.0};
    for (int i = 0; i < 2; ++i) kinks.push_back(ws[i] * std::abs(x[i]));
    double best = std::numeric_limits<double>::infinity();
    for (double m : kinks) {
        double cost = t * m;
        for (int i = 0; i < 2; ++i) cost += std::max(0.0, std::abs(x[i]) - m / ws[i]);
        best = std::min(best, cost);
    }
    return best;
}

}  // namespace

TEST_CASE("trivial couple scales by min(1,t)") {
    TrivialCouple tc{2, {}};
    Couple c{tc};
    std::mt19937_64 rng(1);
    const Vector x = random_vec(2, rng);
    for (double t : {0.01, 0.5, 1.0, 3.0, 100.0}) {
        CHECK_THAT(k_functional(c, x, t),
                   Catch::Matchers::WithinRel(std::min(1.0, t) * x.norm(), 1e-13));
    }
    Couple c1{TrivialCouple{2, [](const Vector& v) { return v.cwiseAbs().sum(); }}};
    CHECK_THAT(k_functional(c1, x, 0.25),
               Catch::Matchers::WithinRel(0.25 * x.cwiseAbs().sum(), 1e-13));
    CHECK_THROWS_AS(k_functional(c, x, 0.0), std::invalid_argument);
}

TEST_CASE("diagonal couple closed form is exact") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> logu(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 4);
        std::vector<double> mu(d);
        for (double& m : mu) m = std::pow(10.0, logu(rng));
        Couple c{DiagonalCouple(mu)};
        const Vector x = random_vec(d, rng);
        const double t = std::pow(10.0, logu(rng));

        double expect = 0.0;
        for (int i = 0; i < d; ++i) expect += std::min(1.0, t * mu[i]) * std::abs(x[i]);
        KEvaluation e = k_functional_detail(c, x, t);
        CHECK_THAT(e.value, Catch::Matchers::WithinRel(expect, 1e-12));
        CHECK(e.certified);
        CHECK((e.a + e.b - x).norm() <= 1e-14 * x.norm());
        CHECK_THAT(couple_norm_x(c, e.a) + t * couple_norm_y(c, e.b),
                   Catch::Matchers::WithinRel(e.value, 1e-12) ||
                       Catch::Matchers::WithinAbs(e.value, 1e-14));
    }
    CHECK_THROWS_AS(DiagonalCouple({}), std::invalid_argument);
    CHECK_THROWS_AS(DiagonalCouple({-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(k_functional(Couple{DiagonalCouple({1.0, 2.0})}, Vector(Vector::Ones(3)), 1.0),
                    std::invalid_argument);
}

TEST_CASE("euclidean diagonal couple is sandwiched by the l1 form") {
    std::mt19937_64 rng(3);
    const std::vector<double> mu{0.5, 8.0};
    Couple c{DiagonalCouple(mu, 2.0)};
    for (int trial = 0; trial < 6; ++trial) {
        const Vector x = random_vec(2, rng, true);
        for (double t : {0.05, 1.0, 20.0}) {
            double l1 = 0.0;
            for (int i = 0; i < 2; ++i) l1 += std::min(1.0, t * mu[i]) * std::abs(x[i]);
            const double k = k_functional(c, x, t);
            CHECK(k <= l1 * (1.0 + 1e-9));
            CHECK(k >= l1 / std::sqrt(2.0) * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("general finite-dimensional couple matches the kink oracle") {
    const double w0 = 1.0, w1 = 3.0;
    GeneralFiniteDimCouple gc{2, [](const Vector& v) { return lr_norm(v, 1.0); },
                              [&](const Vector& v) {
                                  return std::max(w0 * std::abs(v[0]), w1 * std::abs(v[1]));
                              },
                              true};
    Couple c{gc};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> logu(-1.5, 1.5);
    for (int trial = 0; trial < 12; ++trial) {
        const Vector x = random_vec(2, rng, true);
        const double t = std::pow(10.0, logu(rng));
        KEvaluation e = k_functional_detail(c, x, t);
        CHECK(e.certified);
        CHECK(e.gap <= 1e-3);
        CHECK_THAT(e.value, Catch::Matchers::WithinRel(gfd_oracle(x, t, w0, w1), 1e-3));
    }
}

TEST_CASE("function couple uses the partial integral of the rearrangement") {
    LogGrid g(1e-3, 1e3, 241);
    Couple c{L1LinfCouple{}};
    std::vector<double> v(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.node(i) > 0.01 && g.node(i) < 0.1) v[i] = 3.0;
        if (g.node(i) > 1.0 && g.node(i) < 20.0) v[i] = -1.0;
    }
    SampledFunction f(g, std::move(v));
    RearrangementResult r = decreasing_rearrangement(
        f.map([](double x) { return std::abs(x); }), Weight::one());

    for (double t : {0.02, 0.5, 5.0, 50.0}) {
        const double k = k_functional(c, f, t);
        CHECK_THAT(k, Catch::Matchers::WithinRel(r.integral_to(t), 1e-12));
        FunctionDecomposition dec = optimal_decomposition(c, f, t);
        const double cost = couple_norm_x(L1LinfCouple{}, dec.a) +
                            t * couple_norm_y(L1LinfCouple{}, dec.b);
        CHECK_THAT(cost, Catch::Matchers::WithinRel(k, 1e-12) ||
                             Catch::Matchers::WithinAbs(k, 1e-12));
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK_THAT(dec.a[i] + dec.b[i], Catch::Matchers::WithinAbs(f[i], 1e-14));
    }
    CHECK_THROWS_AS(k_functional(Couple{DiagonalCouple({1.0})}, f, 1.0), std::invalid_argument);
}

TEST_CASE("domain couple is exact in one dimension") {
    Matrix a(1, 1);
    a(0, 0) = 1.5;
    Couple c{DomainCouple{a}};
    Vector x(1);
    x << Complex(2.0, -1.0);
    for (double t : {0.01, 0.3, 1.0, 10.0}) {
        const double expect = x.norm() * std::min(1.0, 2.5 * t);
        CHECK_THAT(k_functional(c, x, t), Catch::Matchers::WithinRel(expect, 1e-9));
    }
}

TEST_CASE("domain couple agrees with a brute search in two dimensions") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 4.0;
    Couple c{DomainCouple{a}};
    std::mt19937_64 rng(6);
    auto brute = [&](const Vector& x, double t) {
        auto cost = [&](double b0, double b1) {
            Vector b(2);
            b << Complex(b0, 0.0), Complex(b1, 0.0);
            return (x - b).norm() + t * (b.norm() + (a * b).norm());
        };
        double lo0 = std::min(0.0, x[0].real()), hi0 = std::max(0.0, x[0].real());
        double lo1 = std::min(0.0, x[1].real()), hi1 = std::max(0.0, x[1].real());
        double best = std::numeric_limits<double>::infinity(), c0 = 0.0, c1 = 0.0;
        for (int round = 0; round < 8; ++round) {
            const double s0 = (hi0 - lo0) / 60.0, s1 = (hi1 - lo1) / 60.0;
            for (int i = 0; i <= 60; ++i)
                for (int j = 0; j <= 60; ++j) {
                    const double v = cost(lo0 + i * s0, lo1 + j * s1);
                    if (v < best) {
                        best = v;
                        c0 = lo0 + i * s0;
                        c1 = lo1 + j * s1;
                    }
                }
            lo0 = c0 - 2.0 * s0; hi0 = c0 + 2.0 * s0;
            lo1 = c1 - 2.0 * s1; hi1 = c1 + 2.0 * s1;
        }
        return best;
    };
    for (int trial = 0; trial < 5; ++trial) {
        const Vector x = random_vec(2, rng, true);
        for (double t : {0.05, 1.0, 5.0}) {
            const double k = k_functional(c, x, t);
            CHECK_THAT(k, Catch::Matchers::WithinRel(brute(x, t), 1e-6));
        }
    }
}

TEST_CASE("k curves are monotone and concave at every grid triple") {
    LogGrid g(1e-4, 1e4, 321);
    std::mt19937_64 rng(7);
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 5.0;
    a(1, 1) = 1.0;
    const Vector x = random_vec(2, rng);
    std::vector<Couple> couples{Couple{DiagonalCouple({0.3, 20.0})}, Couple{DomainCouple{a}}};
    for (const Couple& c : couples) {
        KCurve curve = k_curve(c, x, g);
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            CHECK(curve.values[i] <= curve.values[i + 1] * (1.0 + 1e-12));
            CHECK(curve.values[i] / g.node(i) >=
                  curve.values[i + 1] / g.node(i + 1) * (1.0 - 1e-12));
        }
        for (std::size_t i = 0; i + 2 < g.size(); ++i) {
            const double t1 = g.node(i), t2 = g.node(i + 1), t3 = g.node(i + 2);
            const double chord =
                curve.values[i] + (curve.values[i + 2] - curve.values[i]) * (t2 - t1) / (t3 - t1);
            CHECK(curve.values[i + 1] >= chord - 1e-12 * curve.values[i + 2]);
        }
    }
}

TEST_CASE("k-method norm matches the classical closed form") {
    LogGrid g(1e-4, 1e4, 801);
    for (double mu : {0.1, 10.0}) {
        Couple c{DiagonalCouple({mu})};
        Vector e1(1);
        e1 << 1.0;
        for (auto [theta, q] : {std::pair{0.3, 2.0}, std::pair{0.5, 3.0}}) {
            const double expect =
                std::pow(mu, theta) *
                std::pow(1.0 / (q * (1.0 - theta)) + 1.0 / (q * theta), 1.0 / q);
            const double got = k_method_norm(c, classical_phi(theta, q), e1, g);
            CHECK_THAT(got, Catch::Matchers::WithinRel(expect, 0.02));
        }
    }
}

TEST_CASE("k-method norm rejects trivial target spaces and zero input") {
    LogGrid g(1e-3, 1e3, 241);
    Couple c{DiagonalCouple({1.0, 4.0})};
    Vector x(2);
    x << 1.0, 1.0;
    CHECK_THROWS_AS(k_method_norm(c, PhiSpace{RiSpace::lp(2.0), Weight::power(1.0)}, x, g),
                    trivial_space_error);
    CHECK(k_method_norm(c, classical_phi(0.5, 2.0), Vector(Vector::Zero(2)), g) == 0.0);
    CHECK_THROWS_AS(trace_construction(c, classical_phi(0.5, 2.0), Vector(Vector::Zero(2)), g),
                    std::invalid_argument);
}

TEST_CASE("trace construction is admissible and brackets the k-method norm") {
    LogGrid g(1e-4, 1e4, 641);
    std::mt19937_64 rng(8);
    const std::vector<double> mu{0.4, 6.0, 50.0};
    Couple c{DiagonalCouple(mu)};
    const Vector x = random_vec(3, rng);
    const double theta = 0.5, q = 2.0;
    PhiSpace phi = classical_phi(theta, q);

    TraceNormResult tr = trace_method_norm_detail(c, phi, x, g);
    CHECK(tr.u_part > 0.0);
    CHECK(tr.du_part > 0.0);
    CHECK_THAT(tr.value, Catch::Matchers::WithinRel(tr.u_part + tr.du_part, 1e-12));
    const double scale = couple_norm_x(c, x) + couple_norm_y(c, x);
    CHECK(tr.trace.initial_mismatch <= 1e-6 * scale);

    const double k = k_method_norm(c, phi, x, g);
    const double cth = std::max(1.0 / theta, 1.0);
    CHECK(k <= cth * tr.value * 1.1);
    CHECK(tr.value <= 4.0 * cth * k * 1.1);
}

TEST_CASE("bounded operators stay bounded in the interpolation norm") {
    LogGrid g(1e-3, 1e3, 301);
    Couple c{DiagonalCouple({1.0, 4.0})};
    Matrix swap = Matrix::Zero(2, 2);
    swap(0, 1) = 1.0;
    swap(1, 0) = 1.0;
    std::mt19937_64 rng(9);
    std::vector<Vector> xs;
    for (int k = 0; k < 5; ++k) xs.push_back(random_vec(2, rng));

    InterpCheckReport rep = operator_interp_check(c, classical_phi(0.5, 2.0), swap, xs, g);
    CHECK(rep.norms_exact);
    CHECK_THAT(rep.op_norm_x, Catch::Matchers::WithinRel(1.0, 1e-12));
    CHECK_THAT(rep.op_norm_y, Catch::Matchers::WithinRel(4.0, 1e-12));
    CHECK(rep.checked == xs.size());
    CHECK(rep.max_ratio <= 1.02);
}
