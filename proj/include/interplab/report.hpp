#pragma once

// Report document for the command-line tool: a deterministic JSON envelope
// (command echo, tool version, seed, config, named results, error-bar
// annotations, structured errors) plus two-column CSV emission for curves.
// Requires the vendored nlohmann json header on the include path.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "interplab/matrix.hpp"
#include "interplab/spaces.hpp"
#include "interplab/version.hpp"
#include "interplab/weight_classes.hpp"

namespace interplab {

using Json = nlohmann::ordered_json;

class ReportDocument {
  public:
    ReportDocument(std::string command, unsigned long long seed) {
        doc_["tool"] = "interplab";
        doc_["version"] = version_string;
        doc_["command"] = std::move(command);
        doc_["seed"] = seed;
        doc_["config"] = Json::object();
        doc_["results"] = Json::object();
        doc_["annotations"] = Json::object();
        doc_["errors"] = Json::array();
    }

    Json& config() { return doc_["config"]; }
    Json& results() { return doc_["results"]; }
    Json& annotations() { return doc_["annotations"]; }

    void add_error(const std::string& stage, const std::string& message) {
        doc_["errors"].push_back(Json{{"stage", stage}, {"message", message}});
    }

    bool failed() const { return !doc_.at("errors").empty(); }

    std::string serialize() const { return doc_.dump(2) + "\n"; }

  private:
    Json doc_;
};

inline Json json_of(const NormValue& nv) {
    Json j;
    j["value"] = nv.value;
    j["edge_bound"] = nv.edge_bound;
    if (nv.quasi_norm) j["quasi_norm"] = true;
    if (nv.extension_unstable) j["extension_unstable"] = true;
    return j;
}

inline Json json_of(const ConstantEstimate& est) {
    Json j;
    switch (est.verdict) {
        case ConstantEstimate::Verdict::Finite: j["verdict"] = "finite"; break;
        case ConstantEstimate::Verdict::Diverging: j["verdict"] = "diverging"; break;
        default: j["verdict"] = "inconclusive"; break;
    }
    if (est.verdict == ConstantEstimate::Verdict::Finite) {
        j["value"] = est.value;
        j["argmax"] = est.argmax;
    }
    if (!est.reason.empty()) j["reason"] = est.reason;
    return j;
}

inline Json json_of(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(Json{{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
        rows.push_back(std::move(row));
    }
    return rows;
}

// Two-column curve file, 17 significant digits (round-trip exact).
inline void emit_csv(const std::vector<std::pair<double, double>>& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot write '" + path + "'");
    out << "t,value\n";
    char buf[64];
    for (const auto& [t, v] : curve) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, v);
        out << buf;
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

}
