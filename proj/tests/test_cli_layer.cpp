#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "interplab/report.hpp"
#include "interplab/specparse.hpp"

using namespace interplab;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/interplab_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("report documents carry a fixed deterministic envelope") {
    ReportDocument doc("interplab boyd --space lp:2", 42);
    doc.config()["space"] = "lp:2";
    doc.results()["alpha"] = 1.5;

    Json j = Json::parse(doc.serialize());
    const std::vector<std::string> keys{"tool",   "version", "command",     "seed",
                                        "config", "results", "annotations", "errors"};
    REQUIRE(j.size() == keys.size());
    std::size_t k = 0;
    for (auto it = j.begin(); it != j.end(); ++it) CHECK(it.key() == keys[k++]);
    CHECK(j["tool"] == "interplab");
    CHECK(j["seed"] == 42);
    CHECK(j["command"] == "interplab boyd --space lp:2");
    CHECK_FALSE(doc.failed());

    ReportDocument again("interplab boyd --space lp:2", 42);
    again.config()["space"] = "lp:2";
    again.results()["alpha"] = 1.5;
    CHECK(doc.serialize() == again.serialize());

    doc.add_error("parse", "bad spec");
    CHECK(doc.failed());
    Json je = Json::parse(doc.serialize());
    CHECK(je["errors"][0]["stage"] == "parse");
}

TEST_CASE("norm values and constants serialize with conditional fields") {
    NormValue plain{1.25, 0.01, false, false};
    Json jp = json_of(plain);
    CHECK(jp["value"] == 1.25);
    CHECK_FALSE(jp.contains("quasi_norm"));
    CHECK_FALSE(jp.contains("extension_unstable"));

    NormValue flagged{1.25, 0.01, true, true};
    Json jf = json_of(flagged);
    CHECK(jf["quasi_norm"] == true);
    CHECK(jf["extension_unstable"] == true);

    ConstantEstimate fin;
    fin.value = 4.0;
    fin.argmax = 2.0;
    Json jfin = json_of(fin);
    CHECK(jfin["verdict"] == "finite");
    CHECK(jfin["value"] == 4.0);

    ConstantEstimate div;
    div.verdict = ConstantEstimate::Verdict::Diverging;
    div.reason = "tail too heavy";
    Json jdiv = json_of(div);
    CHECK(jdiv["verdict"] == "diverging");
    CHECK_FALSE(jdiv.contains("value"));
    CHECK(jdiv["reason"] == "tail too heavy");

    Matrix m = Matrix::Zero(1, 2);
    m(0, 1) = Complex(0.5, -2.0);
    Json jm = json_of(m);
    CHECK(jm[0][1]["re"] == 0.5);
    CHECK(jm[0][1]["im"] == -2.0);
}

TEST_CASE("csv emission round-trips doubles exactly") {
    const std::string path = "/tmp/interplab_test_curve.csv";
    std::vector<std::pair<double, double>> curve{{1.0 / 3.0, 0.1}, {2.5e-7, 7.0 / 11.0}};
    emit_csv(curve, path);

    std::ifstream in(path);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header == "t,value");
    for (const auto& [t, v] : curve) {
        std::string line;
        REQUIRE(std::getline(in, line));
        const auto comma = line.find(',');
        CHECK(std::stod(line.substr(0, comma)) == t);
        CHECK(std::stod(line.substr(comma + 1)) == v);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(emit_csv(curve, "/nonexistent_dir/x.csv"), std::runtime_error);
}

TEST_CASE("grid specs parse as tmin,tmax,n") {
    LogGrid g = spec::parse_grid("1e-3,1e3,121");
    CHECK_THAT(g.t_min(), Catch::Matchers::WithinRel(1e-3, 1e-12));
    CHECK_THAT(g.t_max(), Catch::Matchers::WithinRel(1e3, 1e-12));
    CHECK(g.size() == 121);
    CHECK_THROWS_AS(spec::parse_grid("1,10"), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_grid("1,10,abc"), std::invalid_argument);
}

TEST_CASE("complex tokens cover the documented forms") {
    using spec::detail::parse_complex;
    CHECK(parse_complex("1.5") == Complex(1.5, 0.0));
    CHECK(parse_complex("-2e3") == Complex(-2000.0, 0.0));
    CHECK(parse_complex("i") == Complex(0.0, 1.0));
    CHECK(parse_complex("-i") == Complex(0.0, -1.0));
    CHECK(parse_complex("2i") == Complex(0.0, 2.0));
    CHECK(parse_complex("1+2i") == Complex(1.0, 2.0));
    CHECK(parse_complex("3.5-1e-2i") == Complex(3.5, -0.01));
    CHECK_THROWS_AS(parse_complex("1+2j"), std::invalid_argument);
    CHECK_THROWS_AS(parse_complex(""), std::invalid_argument);
}

TEST_CASE("weight specs parse powers and sample files") {
    Weight p = spec::parse_weight("pow:0.5");
    CHECK(p.label() == Weight::power(0.5).label());
    CHECK_THAT(p.value_at(4.0), Catch::Matchers::WithinRel(2.0, 1e-12));

    Weight pp = spec::parse_weight("pp:-0.5,-1");
    CHECK_THAT(pp.value_at(0.25), Catch::Matchers::WithinRel(2.0, 1e-12));
    CHECK_THAT(pp.value_at(4.0), Catch::Matchers::WithinRel(0.25, 1e-12));

    std::string csv = "t,w\n";
    LogGrid g(1e-2, 1e2, 41);
    for (std::size_t i = 0; i < g.size(); ++i)
        csv += std::to_string(g.node(i)) + "," + std::to_string(3.0 * std::sqrt(g.node(i))) + "\n";
    TempFile file("w.csv", csv);
    Weight fw = spec::parse_weight("file:" + file.path);
    CHECK_FALSE(fw.analytic());
    CHECK_THAT(fw.value_at(1.0), Catch::Matchers::WithinRel(3.0, 1e-3));

    TempFile bad_cols("w_cols.csv", "1,2,3\n10,2,3\n");
    CHECK_THROWS_AS(spec::parse_weight("file:" + bad_cols.path), std::invalid_argument);
    TempFile not_log("w_lin.csv", "1,1\n2,1\n3,1\n");
    CHECK_THROWS_AS(spec::parse_weight("file:" + not_log.path), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_weight("gauss:1"), std::invalid_argument);
}

TEST_CASE("space specs parse base and optional weight") {
    PhiSpace plain = spec::parse_space("lp:2");
    CHECK(plain.base.kind == RiSpace::Kind::Lebesgue);
    CHECK(plain.base.p == 2.0);
    CHECK(plain.weight.label() == Weight::one().label());

    PhiSpace lor = spec::parse_space("lorentz:3,2@pp:-0.5,-1");
    CHECK(lor.base.kind == RiSpace::Kind::Lorentz);
    CHECK(lor.base.p == 3.0);
    CHECK(lor.base.q == 2.0);
    CHECK(lor.weight.label() == Weight::piecewise_power(-0.5, -1.0).label());

    CHECK_THROWS_AS(spec::parse_space("lorentz:3"), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_space("sobolev:1"), std::invalid_argument);
}

TEST_CASE("matrix specs parse the four constructors") {
    Matrix d = spec::parse_matrix("diag:1,4");
    CHECK(d(0, 0) == Complex(1.0));
    CHECK(d(1, 1) == Complex(4.0));
    CHECK(d(0, 1) == Complex(0.0));

    Matrix dc = spec::parse_matrix("diag:2i,1+1i");
    CHECK(dc(0, 0) == Complex(0.0, 2.0));
    CHECK(dc(1, 1) == Complex(1.0, 1.0));

    Matrix j = spec::parse_matrix("jordan:5");
    CHECK(j(0, 0) == Complex(1.0));
    CHECK(j(0, 1) == Complex(5.0));
    CHECK(j(1, 1) == Complex(1.0));

    Matrix r = spec::parse_matrix("rot:0.5");
    CHECK_THAT(std::abs(r(0, 0) - std::polar(1.0, 0.5)), Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(r(1, 1) - std::polar(1.0, -0.5)), Catch::Matchers::WithinAbs(0.0, 1e-15));

    TempFile mf("m.csv", "1,2i\n0,3\n");
    Matrix f = spec::parse_matrix("file:" + mf.path);
    CHECK(f(0, 1) == Complex(0.0, 2.0));
    CHECK(f(1, 1) == Complex(3.0));

    TempFile bad("m_bad.csv", "1,2,3\n4,5,6\n");
    CHECK_THROWS_AS(spec::parse_matrix("file:" + bad.path), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_matrix("hilbert:3"), std::invalid_argument);
}

TEST_CASE("vector and family specs parse and seed deterministically") {
    Vector v = spec::parse_vector("1, 2i, -0.5+0.5i");
    REQUIRE(v.size() == 3);
    CHECK(v[1] == Complex(0.0, 2.0));
    CHECK(v[2] == Complex(-0.5, 0.5));

    auto fam = spec::parse_vector_family("seeded:3", 4, 42);
    REQUIRE(fam.size() == 3);
    for (const Vector& x : fam) CHECK_THAT(x.norm(), Catch::Matchers::WithinRel(1.0, 1e-12));
    auto fam2 = spec::parse_vector_family("seeded:3", 4, 42);
    CHECK((fam[0] - fam2[0]).norm() == 0.0);
    auto fam3 = spec::parse_vector_family("seeded:3", 4, 43);
    CHECK((fam[0] - fam3[0]).norm() > 1e-3);

    TempFile vf("v.csv", "1,0\n0,2i\n");
    auto rows = spec::parse_vector_family("file:" + vf.path, 2, 0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == Complex(0.0, 2.0));
    CHECK_THROWS_AS(spec::parse_vector_family("file:" + vf.path, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_vector_family("seeded:0", 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_vector_family("grid:3", 2, 0), std::invalid_argument);
}

TEST_CASE("right-hand-side specs cover the solver inputs") {
    LogGrid g(1e-2, 1e2, 41);

    VectorSampledFunction z = spec::parse_rhs("zero", g, 2, 0);
    CHECK(z.value(7).norm() == 0.0);

    VectorSampledFunction c = spec::parse_rhs("const:2", g, 2, 0);
    CHECK((c.value(0) - Vector::Constant(2, Complex(2.0))).norm() == 0.0);

    VectorSampledFunction ph = spec::parse_rhs("powhead:0.3", g, 4, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.node(i);
        const double expect = t <= 1.0 ? std::pow(t, -0.3) : 0.0;
        CHECK_THAT(ph.value(i).norm(), Catch::Matchers::WithinAbs(expect, 1e-12));
    }

    VectorSampledFunction s1 = spec::parse_rhs("seeded", g, 2, 9);
    VectorSampledFunction s2 = spec::parse_rhs("seeded", g, 2, 9);
    CHECK(s1.max_difference(s2) == 0.0);
    CHECK_THROWS_AS(spec::parse_rhs("ramp:1", g, 2, 0), std::invalid_argument);
}

TEST_CASE("couple specs build each couple kind") {
    Vector x(2);
    x << 3.0, -4.0;

    Couple tc = spec::parse_couple("trivial:2");
    CHECK_THAT(k_functional(tc, x, 0.5), Catch::Matchers::WithinRel(2.5, 1e-12));

    Couple dc = spec::parse_couple("diag:1,4");
    CHECK_THAT(couple_norm_y(dc, x), Catch::Matchers::WithinRel(19.0, 1e-12));

    Couple gc = spec::parse_couple("gfd:1,3");
    CHECK_THAT(couple_norm_x(gc, x), Catch::Matchers::WithinRel(7.0, 1e-12));
    CHECK_THAT(couple_norm_y(gc, x), Catch::Matchers::WithinRel(12.0, 1e-12));

    Couple lc = spec::parse_couple("l1linf");
    CHECK(std::holds_alternative<L1LinfCouple>(lc));

    Couple mc = spec::parse_couple("domain:diag:1,4");
    CHECK_THAT(couple_norm_y(mc, x), Catch::Matchers::WithinRel(5.0 + std::sqrt(9.0 + 256.0), 1e-12));

    CHECK_THROWS_AS(spec::parse_couple("gfd:1,-3"), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_couple("gfd:1"), std::invalid_argument);
    CHECK_THROWS_AS(spec::parse_couple("pair:1"), std::invalid_argument);
}
