#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chain.hpp"
#include "problem.hpp"
#include "report.hpp"
#include "types.hpp"

namespace composolve {

inline nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Vector vector_from_json(const nlohmann::json& a) {
    Vector v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
    return v;
}

inline nlohmann::json matrix_to_json(const Matrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& rows) {
    if (rows.empty()) return Matrix(0, 0);
    Matrix M(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            M(i, j) = rows[i][j].get<double>();
    return M;
}

/// Problem document plus the instance metadata a harness needs to judge the
/// result (closed-form optima, hidden moduli, chain geometry).
struct LoadedProblem {
    CompositeProblem problem;
    Vector x0;
    std::string family; // chain_sc | chain_nc | chain_c | quadratic
    Index N = 0, d = 0;
    double mu_f_true = 0.0; // chain_c keeps the modulus it hides from solvers
    std::optional<ScChainInstance> sc_chain;
    std::optional<NcChainInstance> nc_chain;
};

inline nlohmann::json instance_to_json(const ScChainInstance& inst, bool declared_convex,
                                       bool duplicate_row = false) {
    nlohmann::json j;
    j["f"] = {{"kind", declared_convex ? "chain_c" : "chain_sc"},
              {"N", inst.N},
              {"d", inst.d},
              {"L_f", inst.L_f},
              {"alpha", inst.alpha}};
    if (declared_convex)
        j["f"]["mu_f_true"] = inst.mu_f;
    else
        j["f"]["mu_f"] = inst.mu_f;
    j["h"] = {{"kind", "indicator_zero"}};
    j["A"] = {{"kind", duplicate_row ? "chain_dup_row" : "chain"},
              {"N", inst.N},
              {"d", inst.d}};
    Index m = (duplicate_row ? 2 * inst.N : 2 * inst.N - 1) * inst.d;
    j["b"] = vector_to_json(Vector::Zero(m));
    return j;
}

inline nlohmann::json instance_to_json(const NcChainInstance& inst) {
    nlohmann::json j;
    j["f"] = {{"kind", "chain_nc"},
              {"N", inst.N},
              {"d", inst.d},
              {"L_f", inst.L_f},
              {"alpha", inst.alpha}};
    j["h"] = {{"kind", "indicator_zero"}};
    j["A"] = {{"kind", "chain"}, {"N", inst.N}, {"d", inst.d}};
    j["b"] = vector_to_json(Vector::Zero((2 * inst.N - 1) * inst.d));
    return j;
}

inline LinearMap chain_map_from_json(const nlohmann::json& A) {
    std::string kind = A.at("kind").get<std::string>();
    Index N = A.at("N").get<Index>(), d = A.at("d").get<Index>();
    if (kind == "chain") return build_chain_matrix(N, d);
    if (kind == "chain_dup_row") return build_chain_matrix_duplicate_row(N, d);
    throw ParameterError("problem JSON: unsupported A.kind '" + kind + "'");
}

inline ProxCapableFunction prox_from_json(const nlohmann::json& h) {
    std::string kind = h.at("kind").get<std::string>();
    if (kind == "indicator_zero") return make_indicator_zero();
    if (kind == "indicator_nonpositive_orthant") return make_indicator_nonpositive_orthant();
    if (kind == "euclidean_norm") return make_euclidean_norm();
    if (kind == "l1_norm") return make_l1_norm();
    throw ParameterError("problem JSON: unsupported h.kind '" + kind + "'");
}

inline LoadedProblem load_problem(const nlohmann::json& j) {
    LoadedProblem lp;
    const auto& f = j.at("f");
    std::string kind = f.at("kind").get<std::string>();
    lp.family = kind;
    if (kind == "chain_sc" || kind == "chain_c") {
        ScChainInstance inst;
        inst.N = f.at("N").get<Index>();
        inst.d = f.at("d").get<Index>();
        inst.L_f = f.at("L_f").get<double>();
        inst.mu_f = kind == "chain_c" ? f.at("mu_f_true").get<double>()
                                      : f.at("mu_f").get<double>();
        inst.alpha = f.at("alpha").get<double>();
        lp.N = inst.N;
        lp.d = inst.d;
        lp.mu_f_true = inst.mu_f;
        lp.problem.f = inst.objective();
        if (kind == "chain_c") lp.problem.f.mu_f = 0.0;
        lp.problem.A = chain_map_from_json(j.at("A"));
        lp.sc_chain = inst;
    } else if (kind == "chain_nc") {
        NcChainInstance inst;
        inst.N = f.at("N").get<Index>();
        inst.d = f.at("d").get<Index>();
        inst.L_f = f.at("L_f").get<double>();
        inst.alpha = f.at("alpha").get<double>();
        lp.N = inst.N;
        lp.d = inst.d;
        lp.problem.f = inst.objective();
        lp.problem.A = chain_map_from_json(j.at("A"));
        lp.nc_chain = inst;
    } else if (kind == "quadratic") {
        Matrix Q = matrix_from_json(f.at("Q"));
        Vector c = vector_from_json(f.at("c"));
        lp.problem.f = make_quadratic(Q, c);
        const auto& A = j.at("A");
        if (A.at("kind").get<std::string>() != "dense")
            throw ParameterError("problem JSON: quadratic f expects a dense A");
        lp.problem.A = make_dense_map(matrix_from_json(A.at("matrix")));
    } else {
        throw ParameterError("problem JSON: unsupported f.kind '" + kind + "'");
    }
    lp.problem.h = prox_from_json(j.at("h"));
    lp.problem.b = vector_from_json(j.at("b"));
    lp.x0 = j.contains("x0") ? vector_from_json(j.at("x0"))
                             : Vector(Vector::Zero(lp.problem.A.n));
    if (lp.problem.b.size() != lp.problem.A.m || lp.x0.size() != lp.problem.A.n)
        throw ParameterError("problem JSON: b/x0 dimensions do not match A");
    return lp;
}

inline nlohmann::json report_to_json(const SolverReport& r) {
    nlohmann::json j;
    j["algorithm"] = r.algorithm;
    j["tolerance"] = r.tolerance;
    j["converged"] = r.converged;
    j["outer_iterations"] = r.outer_iterations;
    j["wall_seconds"] = r.wall_seconds;
    j["counters"] = {{"grad_f", r.counters.grad_f},
                     {"apply_A", r.counters.apply_A},
                     {"apply_At", r.counters.apply_At},
                     {"prox_h", r.counters.prox_h}};
    j["x"] = vector_to_json(r.x);
    j["lambda"] = vector_to_json(r.lambda);
    return j;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << j.dump(2) << "\n";
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open input file: " + path);
    return nlohmann::json::parse(f);
}

} // namespace composolve
