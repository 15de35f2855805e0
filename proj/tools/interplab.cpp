// Command-line frontend: every subcommand assembles a deterministic JSON
// report (stdout or --out) from the library calls; curves go to CSV files.
// Numeric failures become structured error entries with a nonzero exit,
// parse failures exit with usage text.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "interplab/hardy.hpp"
#include "interplab/maxreg.hpp"
#include "interplab/report.hpp"
#include "interplab/sectorial.hpp"
#include "interplab/specparse.hpp"
#include "interplab/weight_classes.hpp"

namespace {

using namespace interplab;

unsigned long long seed_from_env() {
    const char* env = std::getenv("INTERPLAB_SEED");
    if (env == nullptr || *env == '\0') return 42;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0')
        throw std::invalid_argument("INTERPLAB_SEED must be a nonnegative integer, got '" +
                                    std::string(env) + "'");
    return v;
}

std::string echo_command(int argc, char** argv) {
    std::string out = "interplab";
    for (int i = 1; i < argc; ++i) {
        out += ' ';
        out += argv[i];
    }
    return out;
}

double default_working_angle(const SectorialOperator& op) {
    return std::min(op.angle_estimate + std::numbers::pi / 4.0, std::numbers::pi - 0.2);
}

Json grid_json(const LogGrid& g) {
    return Json{{"t_min", g.t_min()}, {"t_max", g.t_max()}, {"n", g.size()}};
}

// Function mini-language for scalar test families: indicator:LO,HI and
// power:C,E[,LO,HI].
SampledFunction parse_test_function(const std::string& s, const LogGrid& g) {
    namespace sd = interplab::spec::detail;
    std::string rest;
    if (sd::take_prefix(s, "indicator:", rest)) {
        const auto parts = sd::split(rest, ',');
        if (parts.size() != 2) throw std::invalid_argument("indicator: needs LO,HI: '" + s + "'");
        const double lo = sd::parse_double(parts[0]), hi = sd::parse_double(parts[1]);
        return SampledFunction::sample(g, [&](double t) { return t >= lo && t < hi ? 1.0 : 0.0; });
    }
    if (sd::take_prefix(s, "power:", rest)) {
        const auto parts = sd::split(rest, ',');
        if (parts.size() != 2 && parts.size() != 4)
            throw std::invalid_argument("power: needs C,E[,LO,HI]: '" + s + "'");
        const double c = sd::parse_double(parts[0]), e = sd::parse_double(parts[1]);
        const double lo = parts.size() == 4 ? sd::parse_double(parts[2]) : 0.0;
        const double hi = parts.size() == 4 ? sd::parse_double(parts[3]) : detail::kInf;
        return SampledFunction::sample(
            g, [&](double t) { return t >= lo && t < hi ? c * std::pow(t, e) : 0.0; });
    }
    throw std::invalid_argument("unknown test function spec: '" + s + "'");
}

std::vector<std::pair<double, double>> curve_of(const SampledFunction& f) {
    std::vector<std::pair<double, double>> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out.emplace_back(f.grid().node(i), f[i]);
    return out;
}

int run_weights(ReportDocument& rep, const std::string& weight_spec, double p, int decades,
                const std::string& csv_prefix) {
    const Weight w = spec::parse_weight(weight_spec);
    SweepConfig cfg;
    cfg.window_decades = decades;
    const WeightClassReport wc = classify(w, p, cfg);
    rep.config()["weight"] = w.label();
    rep.config()["p"] = p;
    rep.config()["decades"] = decades;
    auto& res = rep.results();
    res["p_side"] = json_of(wc.p_side);
    res["q_side"] = json_of(wc.q_side);
    res["one_sided"] = json_of(wc.one_sided);
    res["one_sided_dual"] = json_of(wc.one_sided_dual);
    res["calderon_class"] = wc.calderon_class;
    res["one_sided_implies_p_side"] = wc.consistency_one_sided_in_p_side;
    res["openness_probe"] =
        Json{{"q", wc.openness_probe_q}, {"estimate", json_of(wc.openness_probe)}};
    if (!csv_prefix.empty()) {
        Json files = Json::array();
        const std::pair<const char*, const ConstantEstimate*> sweeps[] = {
            {"p_side", &wc.p_side},
            {"q_side", &wc.q_side},
            {"one_sided", &wc.one_sided},
            {"one_sided_dual", &wc.one_sided_dual}};
        for (const auto& [name, est] : sweeps) {
            const std::string path = csv_prefix + name + ".csv";
            emit_csv(est->sweep, path);
            files.push_back(path);
        }
        res["csv_files"] = std::move(files);
    }
    return 0;
}

int run_hardy(ReportDocument& rep, const std::string& op_name, const std::string& space_spec,
              const std::string& family_spec, const LogGrid& grid) {
    const PhiSpace phi = spec::parse_space(space_spec);
    const AveragingOp op = op_name == "P"   ? AveragingOp::Hardy
                           : op_name == "Q" ? AveragingOp::Adjoint
                                            : AveragingOp::Calderon;
    std::vector<SampledFunction> family;
    if (family_spec == "default") {
        family = near_extremal_family(op, phi, grid);
    } else {
        std::ifstream in(family_spec);
        if (!in) throw std::invalid_argument("cannot open family file: '" + family_spec + "'");
        std::string line;
        while (std::getline(in, line)) {
            const std::string t = spec::detail::strip(line);
            if (t.empty() || t[0] == '#') continue;
            family.push_back(parse_test_function(t, grid));
        }
        if (family.empty()) throw std::invalid_argument("family file has no entries");
    }
    const OpNormEstimate est = opnorm_lower(op, phi, family);
    rep.config()["op"] = op_name;
    rep.config()["space"] = phi.label();
    rep.config()["family_size"] = family.size();
    rep.results()["lower_bound"] = est.lower_bound;
    rep.results()["skipped"] = est.skipped;

    // analytic upper bound on power-weighted Lebesgue spaces
    if (phi.base.kind == RiSpace::Kind::Lebesgue && phi.weight.analytic() &&
        phi.weight.head_exponent() == phi.weight.tail_exponent()) {
        const double q = phi.base.p, a = phi.weight.head_exponent();
        try {
            const double upper = op == AveragingOp::Hardy     ? hardy_upper_weighted(q, a)
                                 : op == AveragingOp::Adjoint ? adjoint_upper_weighted(q, a)
                                                              : calderon_upper_weighted(q, a);
            rep.results()["upper_bound"] = upper;
        } catch (const std::invalid_argument&) {
            rep.results()["upper_bound"] = nullptr;  // operator unbounded on this space
        }
    }
    rep.annotations()["notes"] = est.notes;
    return 0;
}

int run_knorm(ReportDocument& rep, const std::string& couple_spec, const std::string& space_spec,
              const std::string& x_spec, const std::string& curve_path, const LogGrid& grid) {
    const Couple couple = spec::parse_couple(couple_spec);
    const PhiSpace phi = spec::parse_space(space_spec);
    rep.config()["couple"] = couple_spec;
    rep.config()["space"] = phi.label();
    rep.config()["x"] = x_spec;

    auto emit_curve = [&](const KCurve& curve) {
        if (curve_path.empty()) return;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < curve.values.size(); ++i)
            pts.emplace_back(curve.grid.node(i), curve.values[i]);
        emit_csv(pts, curve_path);
        rep.results()["curve_file"] = curve_path;
    };

    if (std::holds_alternative<L1LinfCouple>(couple)) {
        const SampledFunction f = parse_test_function(x_spec, grid);
        const KMethodResult kd = k_method_norm_detail(couple, phi, f, grid);
        rep.results()["k_method_norm"] = Json{{"value", kd.value}, {"edge_bound", kd.edge_bound}};
        rep.results()["trace_method_norm"] = nullptr;
        rep.annotations()["trace"] = "trace construction is defined for vector couples only";
        emit_curve(kd.curve);
        return 0;
    }

    const Vector x = spec::parse_vector(x_spec);
    const KMethodResult kd = k_method_norm_detail(couple, phi, x, grid);
    rep.results()["k_method_norm"] = Json{{"value", kd.value}, {"edge_bound", kd.edge_bound}};
    emit_curve(kd.curve);
    if (kd.value > 0.0) {
        const TraceNormResult tr = trace_method_norm_detail(couple, phi, x, grid);
        rep.results()["trace_method_norm"] =
            Json{{"value", tr.value}, {"u_part", tr.u_part},   {"du_part", tr.du_part},
                 {"u_edge", tr.u_edge}, {"du_edge", tr.du_edge}};
        rep.results()["ratio"] = tr.value / kd.value;
        rep.annotations()["trace_initial_mismatch"] = tr.trace.initial_mismatch;
        rep.annotations()["trace_head_bound"] = tr.trace.head_bound;
    } else {
        rep.results()["trace_method_norm"] = Json{{"value", 0.0}};
        rep.results()["ratio"] = nullptr;
    }
    return 0;
}

int run_calculus(ReportDocument& rep, const std::string& a_spec, const std::string& f_spec,
                 const std::string& contour_spec) {
    namespace sd = interplab::spec::detail;
    const SectorialOperator op = SectorialOperator::from_matrix(spec::parse_matrix(a_spec));
    const double working = default_working_angle(op);
    Contour contour = Contour::auto_for(op, working);
    if (!contour_spec.empty()) {
        const auto parts = sd::split(contour_spec, ',');
        if (parts.size() != 4)
            throw std::invalid_argument("contour spec needs beta,rmin,rmax,npd: '" + contour_spec +
                                        "'");
        contour = Contour{sd::parse_double(parts[0]), sd::parse_double(parts[1]),
                          sd::parse_double(parts[2]),
                          static_cast<int>(sd::parse_count(parts[3]))};
    }

    std::function<Complex(Complex)> scalar;
    Matrix value;
    std::string rest;
    if (f_spec == "e") {
        scalar = [](Complex z) { return z / ((1.0 + z) * (1.0 + z)); };
        value = calc_h0(op, H0Function{scalar, 1.0, 1.0}, contour);
    } else if (f_spec == "one") {
        scalar = [](Complex) { return Complex(1.0); };
        value = calc_e(op, EClassFunction{H0Function{[](Complex) { return Complex(0.0); }, 1.0, 0.0},
                                          0.0, 1.0},
                       contour);
    } else if (f_spec == "resolvent") {
        scalar = [](Complex z) { return 1.0 / (1.0 + z); };
        value = calc_e(op, EClassFunction{H0Function{[](Complex) { return Complex(0.0); }, 1.0, 0.0},
                                          1.0, 0.0},
                       contour);
    } else if (sd::take_prefix(f_spec, "moebius:", rest)) {
        const long k = sd::parse_count(rest);
        scalar = [k](Complex z) { return std::pow((z - 1.0) / (z + 1.0), k); };
        value = calc_hinf(op, HInfFunction{scalar, 1.0}, contour);
    } else if (sd::take_prefix(f_spec, "imagpow:", rest)) {
        const double tau = sd::parse_double(rest);
        scalar = [tau](Complex z) { return std::exp(Complex(0.0, tau) * std::log(z)); };
        value = calc_hinf(op, HInfFunction{scalar, std::exp(std::abs(tau) * working)}, contour);
    } else {
        throw std::invalid_argument("unknown function spec: '" + f_spec +
                                    "' (expected e, one, resolvent, moebius:K, imagpow:TAU)");
    }

    rep.config()["A"] = json_of(op.A);
    rep.config()["f"] = f_spec;
    rep.config()["contour"] = Json{{"angle", contour.angle},
                                   {"r_min", contour.r_min},
                                   {"r_max", contour.r_max},
                                   {"points_per_decade", contour.points_per_decade}};
    rep.results()["f_of_A"] = json_of(value);

    const EigenDecomposition ed = eigen_decomposition(op.A);
    if (std::isfinite(ed.condition) && ed.condition < 1e6) {
        Matrix diag = Matrix::Zero(op.dim(), op.dim());
        for (Eigen::Index i = 0; i < op.dim(); ++i) diag(i, i) = scalar(ed.values[i]);
        const Matrix oracle = ed.vectors * diag * ed.vectors.inverse();
        const double denom = std::max(inf_norm(oracle), 1e-300);
        rep.annotations()["eigen_oracle_residual"] = inf_norm(Matrix(value - oracle)) / denom;
        rep.annotations()["eigenbasis_condition"] = ed.condition;
    }
    return 0;
}

int run_interp_report(ReportDocument& rep, const std::string& a_spec, const std::string& space_spec,
                      const std::string& xs_spec, const LogGrid& grid, unsigned long long seed) {
    const SectorialOperator op = SectorialOperator::from_matrix(spec::parse_matrix(a_spec));
    const PhiSpace phi = spec::parse_space(space_spec);
    const std::vector<Vector> xs = spec::parse_vector_family(xs_spec, op.dim(), seed);
    const InterpNormReport r = interp_norm_report(op, phi, xs, grid);
    rep.config()["A"] = json_of(op.A);
    rep.config()["space"] = phi.label();
    rep.config()["xs"] = xs_spec;
    rep.results()["methods"] = r.labels;
    rep.results()["norms"] = r.norms;
    rep.results()["c_emp"] = r.c_emp;
    rep.results()["worst_x"] = r.worst_x;
    return 0;
}

int run_dore(ReportDocument& rep, const std::string& a_spec, const std::string& space_spec,
             const std::string& family_spec, const std::string& xs_spec, const LogGrid& grid,
             unsigned long long seed) {
    if (family_spec != "default")
        throw std::invalid_argument("dore: only the default family is available");
    const SectorialOperator op = SectorialOperator::from_matrix(spec::parse_matrix(a_spec));
    const PhiSpace phi = spec::parse_space(space_spec);
    const double working = default_working_angle(op);
    const std::vector<Vector> xs = spec::parse_vector_family(xs_spec, op.dim(), seed);
    const DoreReport r = dore_ratio(op, phi, dore_default_family(working), xs, grid, working);
    rep.config()["A"] = json_of(op.A);
    rep.config()["space"] = phi.label();
    rep.config()["working_angle"] = working;
    Json members = Json::array();
    for (const DoreMember& m : r.members)
        members.push_back(Json{{"label", m.label},
                               {"param", m.param},
                               {"sup_bound", m.sup_bound},
                               {"max_ratio", m.max_ratio},
                               {"median_ratio", m.median_ratio}});
    rep.results()["members"] = std::move(members);
    rep.results()["sup_ratio"] = r.sup_ratio;
    return 0;
}

int run_maxreg(ReportDocument& rep, const std::string& a_spec, const std::string& space_spec,
               const std::string& f_spec, const std::string& x0_spec, double horizon, long sweep,
               const LogGrid& grid, unsigned long long seed) {
    const SectorialOperator op = SectorialOperator::from_matrix(spec::parse_matrix(a_spec));
    const PhiSpace phi = spec::parse_space(space_spec);
    const VectorSampledFunction f = spec::parse_rhs(f_spec, grid, op.dim(), seed);
    const Vector x0 = spec::parse_vector(x0_spec);
    const double T = horizon > 0.0 ? horizon : grid.t_max();
    rep.config()["A"] = json_of(op.A);
    rep.config()["space"] = phi.label();
    rep.config()["f"] = f_spec;
    rep.config()["T"] = T;

    const CauchyProblem pb{op, f, x0};
    const MRReport mr = mr_report(pb, phi, T);
    rep.results()["du_norm"] = json_of(mr.seminorms.du_norm);
    rep.results()["au_norm"] = json_of(mr.seminorms.au_norm);
    rep.results()["f_norm"] = json_of(mr.seminorms.f_norm);
    rep.results()["x0_interp_norm"] = mr.x0_interp_norm;
    rep.results()["residual"] = mr.residual;
    rep.results()["ratio"] = mr.ratio;
    if (mr.seminorms.lorentz_grid_only)
        rep.annotations()["norms"] = "Lorentz base: no off-grid continuation";
    const SplitSolution split = split_solve(pb);
    rep.results()["split_mismatch"] = split.mismatch;

    if (sweep > 0) {
        std::vector<std::pair<VectorSampledFunction, Vector>> data;
        std::vector<double> ratios;
        for (long k = 0; k < sweep; ++k) {
            data.emplace_back(spec::parse_rhs("seeded", grid, op.dim(), seed + 1 + static_cast<unsigned long long>(k)),
                              Vector(Vector::Zero(op.dim())));
            ratios.push_back(mr_report(CauchyProblem{op, data.back().first, data.back().second}, phi, T).ratio);
        }
        rep.results()["sweep_ratios"] = ratios;
        rep.results()["mr_constant"] = mr_constant_estimate(op, phi, data, T);
    }
    return 0;
}

int run_boyd(ReportDocument& rep, const std::string& space_spec, int decades, const LogGrid& grid,
             const std::string& csv_path) {
    const PhiSpace phi = spec::parse_space(space_spec);
    if (!(decades >= 8)) throw std::invalid_argument("boyd: need at least 8 decades");
    std::vector<double> ts;
    const int per_decade = 4;
    const int n = decades * per_decade + 1;
    for (int i = 0; i < n; ++i)
        ts.push_back(std::pow(10.0, -0.5 * decades + static_cast<double>(decades) * i / (n - 1)));
    const BoydIndices b = boyd_indices(phi.base, ts, grid);
    rep.config()["space"] = phi.base.label();
    rep.config()["decades"] = decades;
    if (phi.weight.label() != "pow:0")
        rep.annotations()["weight"] = "Boyd indices concern the base space; weight ignored";
    rep.results()["p_index"] = b.lower;
    rep.results()["q_index"] = b.upper;
    if (!csv_path.empty()) {
        emit_csv(b.profile, csv_path);
        rep.results()["csv_file"] = csv_path;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerics for generalized real interpolation spaces"};
    app.name("interplab");
    app.fallthrough();

    std::string grid_spec = "1e-6,1e6,4800";
    std::string out_path;
    app.add_option("--grid", grid_spec, "log grid as tmin,tmax,n")->capture_default_str();
    app.add_option("--out", out_path, "write the JSON report here instead of stdout");
    app.require_subcommand(1);

    auto* weights = app.add_subcommand("weights", "weight-class constants and verdicts");
    weights->require_subcommand(1);
    auto* wc = weights->add_subcommand("classify", "classify a weight at exponent p");
    std::string wc_weight;
    double wc_p = 2.0;
    int wc_decades = 8;
    std::string wc_csv;
    wc->add_option("--weight", wc_weight, "weight spec (pow:A, pp:A,B, file:PATH)")->required();
    wc->add_option("--p", wc_p, "exponent p > 1")->required();
    wc->add_option("--decades", wc_decades, "sweep window length in decades")
        ->capture_default_str();
    wc->add_option("--csv", wc_csv, "prefix for constant-vs-range sweep CSV files");

    auto* hardy = app.add_subcommand("hardy", "averaging operator norm estimation");
    std::string h_op, h_space, h_family = "default";
    hardy->add_option("--op", h_op, "operator: P, Q, or S (sum)")
        ->required()
        ->check(CLI::IsMember({"P", "Q", "S"}));
    hardy->add_option("--space", h_space, "space spec (lp:P[@weight], lorentz:P,Q[@weight])")
        ->required();
    hardy->add_option("--family", h_family, "default, or a file of test function specs")
        ->capture_default_str();

    auto* knorm = app.add_subcommand("knorm", "K-method and trace-method norms");
    std::string k_couple, k_space, k_x, k_curve;
    knorm->add_option("--couple", k_couple,
                      "couple spec (trivial:D, diag:M1,..., gfd:W1,W2, l1linf, domain:MATRIX)")
        ->required();
    knorm->add_option("--space", k_space, "space spec")->required();
    knorm->add_option("--x", k_x, "input vector as comma list (function spec for l1linf)")
        ->required();
    knorm->add_option("--curve", k_curve, "write the K(t,x) curve to this CSV path");

    auto* calculus = app.add_subcommand("calculus", "holomorphic functional calculus");
    std::string c_a, c_f, c_contour;
    calculus->add_option("--A", c_a, "matrix spec (diag:, jordan:, rot:, file:)")->required();
    calculus->add_option("--f", c_f, "function: e, one, resolvent, moebius:K, imagpow:TAU")
        ->required();
    calculus->add_option("--contour", c_contour, "override contour as beta,rmin,rmax,npd");

    auto* interp = app.add_subcommand("interp-report", "interpolation norm representations");
    std::string i_a, i_space, i_xs = "seeded:8";
    interp->add_option("--A", i_a, "matrix spec")->required();
    interp->add_option("--space", i_space, "space spec")->required();
    interp->add_option("--xs", i_xs, "vector family (file:PATH or seeded:N)")
        ->capture_default_str();

    auto* dore = app.add_subcommand("dore", "uniform calculus bound on the interpolation space");
    std::string d_a, d_space, d_family = "default", d_xs = "seeded:4";
    dore->add_option("--A", d_a, "matrix spec (must be invertible)")->required();
    dore->add_option("--space", d_space, "space spec")->required();
    dore->add_option("--family", d_family, "function family (default)")->capture_default_str();
    dore->add_option("--xs", d_xs, "vector family (file:PATH or seeded:N)")->capture_default_str();

    auto* maxreg = app.add_subcommand("maxreg", "Cauchy problem and maximal regularity");
    std::string m_a, m_space, m_f, m_x0;
    double m_T = 0.0;
    long m_sweep = 0;
    maxreg->add_option("--A", m_a, "matrix spec")->required();
    maxreg->add_option("--space", m_space, "space spec")->required();
    maxreg->add_option("--f", m_f, "right-hand side (zero, const:C, powhead:G, seeded)")
        ->required();
    maxreg->add_option("--x0", m_x0, "initial value as comma list")->required();
    maxreg->add_option("--T", m_T, "horizon (default: grid t_max)");
    maxreg->add_option("--sweep", m_sweep, "run N seeded zero-initial problems");

    auto* boyd = app.add_subcommand("boyd", "Boyd indices of the base space");
    std::string b_space, b_csv;
    int b_decades = 12;
    boyd->add_option("--space", b_space, "space spec")->required();
    boyd->add_option("--decades", b_decades, "dilation range in decades")->capture_default_str();
    boyd->add_option("--csv", b_csv, "write the (t, h(t)) profile to this CSV path");

    if (argc <= 1) {
        std::cerr << app.help();
        return 2;
    }
    CLI11_PARSE(app, argc, argv);

    unsigned long long seed = 42;
    ReportDocument rep(echo_command(argc, argv), 42);
    int code = 0;
    try {
        seed = seed_from_env();
        rep = ReportDocument(echo_command(argc, argv), seed);
        const LogGrid grid = spec::parse_grid(grid_spec);
        rep.config()["grid"] = grid_json(grid);
        if (wc->parsed()) code = run_weights(rep, wc_weight, wc_p, wc_decades, wc_csv);
        else if (hardy->parsed()) code = run_hardy(rep, h_op, h_space, h_family, grid);
        else if (knorm->parsed()) code = run_knorm(rep, k_couple, k_space, k_x, k_curve, grid);
        else if (calculus->parsed()) code = run_calculus(rep, c_a, c_f, c_contour);
        else if (interp->parsed()) code = run_interp_report(rep, i_a, i_space, i_xs, grid, seed);
        else if (dore->parsed()) code = run_dore(rep, d_a, d_space, d_family, d_xs, grid, seed);
        else if (maxreg->parsed())
            code = run_maxreg(rep, m_a, m_space, m_f, m_x0, m_T, m_sweep, grid, seed);
        else if (boyd->parsed()) code = run_boyd(rep, b_space, b_decades, grid, b_csv);
    } catch (const std::exception& e) {
        rep.add_error(app.get_subcommands().empty() ? "setup"
                                                    : app.get_subcommands().front()->get_name(),
                      e.what());
        code = 1;
    }

    const std::string text = rep.serialize();
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write report to '" << out_path << "'\n";
            return 1;
        }
        out << text;
    }
    return code;
}
