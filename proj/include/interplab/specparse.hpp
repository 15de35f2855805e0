#pragma once

// Parsers for the mini-languages the command-line tool speaks: weights
// (pow:A, pp:A,B, file:PATH), spaces (lp:P, lorentz:P,Q, @weight suffix),
// matrices (diag:, jordan:, rot:, file:), grids (tmin,tmax,n), vectors,
// vector families, right-hand sides, and couples.  Malformed input throws
// std::invalid_argument carrying the offending text.

#include <cctype>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "interplab/couples.hpp"
#include "interplab/spaces.hpp"
#include "interplab/vector_function.hpp"

namespace interplab::spec {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool take_prefix(const std::string& s, const char* prefix, std::string& rest) {
    const std::string p(prefix);
    if (s.size() < p.size() || s.compare(0, p.size(), p) != 0) return false;
    rest = s.substr(p.size());
    return true;
}

inline double parse_double(const std::string& s) {
    const std::string t = strip(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (used != t.size()) throw std::invalid_argument("trailing junk in number: '" + s + "'");
    return v;
}

inline long parse_count(const std::string& s) {
    const double v = parse_double(s);
    const long n = std::lround(v);
    if (v != static_cast<double>(n) || n < 0)
        throw std::invalid_argument("not a nonnegative integer: '" + s + "'");
    return n;
}

// Accepts 1.5, -2e3, i, -i, 2i, 1+2i, 3.5-1e-2i.
inline Complex parse_complex(const std::string& raw) {
    std::string t = strip(raw);
    if (t.empty()) throw std::invalid_argument("empty complex token");
    if (t.back() != 'i' && t.back() != 'I') return Complex(parse_double(t), 0.0);
    t.pop_back();
    // locate the sign separating real and imaginary parts, skipping
    // exponent signs and a leading sign
    std::size_t cut = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    auto imag_coeff = [](const std::string& v) {
        if (v.empty() || v == "+") return 1.0;
        if (v == "-") return -1.0;
        return parse_double(v);
    };
    if (cut == std::string::npos) return Complex(0.0, imag_coeff(t));
    return Complex(parse_double(t.substr(0, cut)), imag_coeff(t.substr(cut)));
}

inline std::vector<std::string> tokens_of_row(const std::string& line) {
    std::string norm = line;
    for (char& ch : norm)
        if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream iss(norm);
    std::vector<std::string> toks;
    std::string tok;
    while (iss >> tok) toks.push_back(tok);
    return toks;
}

inline std::vector<std::vector<std::string>> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;
        rows.push_back(tokens_of_row(t));
    }
    if (rows.empty()) throw std::invalid_argument("empty file: '" + path + "'");
    return rows;
}

inline bool numeric_row(const std::vector<std::string>& row) {
    for (const std::string& tok : row) {
        try {
            parse_complex(tok);
        } catch (const std::exception&) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

inline LogGrid parse_grid(const std::string& s) {
    const auto parts = detail::split(s, ',');
    if (parts.size() != 3) throw std::invalid_argument("grid spec needs tmin,tmax,n: '" + s + "'");
    return LogGrid(detail::parse_double(parts[0]), detail::parse_double(parts[1]),
                   static_cast<std::size_t>(detail::parse_count(parts[2])));
}

// pow:A | pp:A,B | file:PATH (two-column t,w samples on a log-uniform
// t column; an initial non-numeric header row is skipped).
inline Weight parse_weight(const std::string& s) {
    std::string rest;
    if (detail::take_prefix(s, "pow:", rest)) return Weight::power(detail::parse_double(rest));
    if (detail::take_prefix(s, "pp:", rest)) {
        const auto parts = detail::split(rest, ',');
        if (parts.size() != 2) throw std::invalid_argument("pp: needs two exponents: '" + s + "'");
        return Weight::piecewise_power(detail::parse_double(parts[0]), detail::parse_double(parts[1]));
    }
    if (detail::take_prefix(s, "file:", rest)) {
        auto rows = detail::read_rows(rest);
        if (!detail::numeric_row(rows.front())) rows.erase(rows.begin());
        std::vector<double> ts, ws;
        for (const auto& row : rows) {
            if (row.size() != 2)
                throw std::invalid_argument("weight file rows must be 't,w': '" + rest + "'");
            ts.push_back(detail::parse_double(row[0]));
            ws.push_back(detail::parse_double(row[1]));
        }
        if (ts.size() < 2) throw std::invalid_argument("weight file needs at least 2 rows");
        const double ratio = ts[1] / ts[0];
        for (std::size_t i = 1; i < ts.size(); ++i)
            if (std::abs(ts[i] / ts[i - 1] / ratio - 1.0) > 1e-3)
                throw std::invalid_argument("weight file t column must be log-uniform");
        return Weight::explicit_samples(
            SampledFunction(LogGrid(ts.front(), ts.back(), ts.size()), std::move(ws)));
    }
    throw std::invalid_argument("unknown weight spec: '" + s + "'");
}

// lp:P | lorentz:P,Q, optionally suffixed @WEIGHT.
inline PhiSpace parse_space(const std::string& s) {
    const std::size_t at = s.find('@');
    const std::string base = s.substr(0, at);
    Weight w = at == std::string::npos ? Weight::one() : parse_weight(s.substr(at + 1));
    std::string rest;
    if (detail::take_prefix(base, "lp:", rest))
        return PhiSpace{RiSpace::lp(detail::parse_double(rest)), std::move(w)};
    if (detail::take_prefix(base, "lorentz:", rest)) {
        const auto parts = detail::split(rest, ',');
        if (parts.size() != 2) throw std::invalid_argument("lorentz: needs p,q: '" + s + "'");
        return PhiSpace{RiSpace::lorentz(detail::parse_double(parts[0]), detail::parse_double(parts[1])),
                        std::move(w)};
    }
    throw std::invalid_argument("unknown space spec: '" + s + "'");
}

// diag:Z1,Z2,... | jordan:KAPPA | rot:THETA | file:PATH (one row per line,
// entries as complex tokens).
inline Matrix parse_matrix(const std::string& s) {
    std::string rest;
    if (detail::take_prefix(s, "diag:", rest)) {
        const auto parts = detail::split(rest, ',');
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(parts.size()),
                                static_cast<Eigen::Index>(parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
                detail::parse_complex(parts[i]);
        return m;
    }
    if (detail::take_prefix(s, "jordan:", rest)) {
        Matrix m = Matrix::Identity(2, 2);
        m(0, 1) = detail::parse_complex(rest);
        return m;
    }
    if (detail::take_prefix(s, "rot:", rest)) {
        const double theta = detail::parse_double(rest);
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = std::polar(1.0, theta);
        m(1, 1) = std::polar(1.0, -theta);
        return m;
    }
    if (detail::take_prefix(s, "file:", rest)) {
        const auto rows = detail::read_rows(rest);
        const std::size_t d = rows.size();
        Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
            if (rows[i].size() != d)
                throw std::invalid_argument("matrix file must be square: '" + rest + "'");
            for (std::size_t j = 0; j < d; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    detail::parse_complex(rows[i][j]);
        }
        return m;
    }
    throw std::invalid_argument("unknown matrix spec: '" + s + "'");
}

inline Vector parse_vector(const std::string& s) {
    const auto parts = detail::split(s, ',');
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = detail::parse_complex(parts[i]);
    return v;
}

// file:PATH (one vector per row) | seeded:N (N random unit vectors).
inline std::vector<Vector> parse_vector_family(const std::string& s, Eigen::Index dim,
                                               unsigned long long seed) {
    std::string rest;
    if (detail::take_prefix(s, "file:", rest)) {
        std::vector<Vector> out;
        for (const auto& row : detail::read_rows(rest)) {
            Vector v(static_cast<Eigen::Index>(row.size()));
            for (std::size_t j = 0; j < row.size(); ++j)
                v[static_cast<Eigen::Index>(j)] = detail::parse_complex(row[j]);
            if (v.size() != dim)
                throw std::invalid_argument("vector row dimension mismatch in '" + rest + "'");
            out.push_back(std::move(v));
        }
        return out;
    }
    if (detail::take_prefix(s, "seeded:", rest)) {
        const long n = detail::parse_count(rest);
        if (n <= 0) throw std::invalid_argument("seeded: needs a positive count");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        std::vector<Vector> out;
        for (long k = 0; k < n; ++k) {
            Vector v(dim);
            for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(nd(rng), 0.0);
            if (v.norm() == 0.0) v[0] = 1.0;
            out.push_back(v / v.norm());
        }
        return out;
    }
    throw std::invalid_argument("unknown vector family spec: '" + s + "'");
}

// zero | const:C | powhead:G (t^{-G} on (0,1], along the diagonal
// direction) | seeded (random cell values).
inline VectorSampledFunction parse_rhs(const std::string& s, const LogGrid& g, Eigen::Index dim,
                                       unsigned long long seed) {
    std::string rest;
    if (s == "zero") return VectorSampledFunction::zero(g, dim);
    if (detail::take_prefix(s, "const:", rest)) {
        const Complex c = detail::parse_complex(rest);
        return VectorSampledFunction::sample(g, [&](double) { return Vector::Constant(dim, c); });
    }
    if (detail::take_prefix(s, "powhead:", rest)) {
        const double gamma = detail::parse_double(rest);
        const Vector dir = Vector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
        return VectorSampledFunction::sample(g, [&](double t) {
            return Vector(t <= 1.0 ? Vector(std::pow(t, -gamma) * dir) : Vector(Vector::Zero(dim)));
        });
    }
    if (s == "seeded") {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        std::vector<Vector> vals(g.size());
        for (auto& v : vals) {
            v = Vector(dim);
            for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(nd(rng), 0.0);
        }
        return VectorSampledFunction(g, std::move(vals));
    }
    throw std::invalid_argument("unknown right-hand-side spec: '" + s + "'");
}

// trivial:D | diag:M1,M2,... | l1linf | gfd:W1,W2 (dim 2, l1 against
// weighted max) | domain:MATRIXSPEC.
inline Couple parse_couple(const std::string& s) {
    std::string rest;
    if (detail::take_prefix(s, "trivial:", rest))
        return TrivialCouple{static_cast<Eigen::Index>(detail::parse_count(rest)), {}};
    if (detail::take_prefix(s, "diag:", rest)) {
        const auto parts = detail::split(rest, ',');
        std::vector<double> mu;
        for (const std::string& p : parts) mu.push_back(detail::parse_double(p));
        return DiagonalCouple(std::move(mu));
    }
    if (s == "l1linf") return L1LinfCouple{};
    if (detail::take_prefix(s, "gfd:", rest)) {
        const auto parts = detail::split(rest, ',');
        if (parts.size() != 2) throw std::invalid_argument("gfd: needs two weights: '" + s + "'");
        const double w0 = detail::parse_double(parts[0]), w1 = detail::parse_double(parts[1]);
        if (!(w0 > 0.0 && w1 > 0.0)) throw std::invalid_argument("gfd: weights must be positive");
        return GeneralFiniteDimCouple{
            2, [](const Vector& v) { return lr_norm(v, 1.0); },
            [w0, w1](const Vector& v) {
                return std::max(w0 * std::abs(v[0]), w1 * std::abs(v[1]));
            },
            true};
    }
    if (detail::take_prefix(s, "domain:", rest)) return DomainCouple{parse_matrix(rest)};
    throw std::invalid_argument("unknown couple spec: '" + s + "'");
}

}  // namespace interplab::spec
