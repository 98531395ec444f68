// Command-line front end: generate instances, run solvers, run the
// self-verification suite, and sweep benchmark grids. Every run is
// deterministic for fixed arguments; wall-clock output is opt-in so the
// emitted files stay byte-stable.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <composolve/composolve.hpp>

namespace fs = std::filesystem;
using namespace composolve;

namespace {

// ---------------------------------------------------------------- gen

struct GenOptions {
    std::string family = "sc";
    double kappa_a = 3.0;
    double kappa_f = 8.0;
    long long k_budget = 9;
    double lf = 1.0;
    double delta = 1.0; // nc: bound on the initial objective gap
    double dist = 1.0;  // sc/c/quadratic: ||x0 - x*||
    long long n = 8, m = 4;
    std::uint64_t seed = 0;
    bool dup_row = false;
    std::string out;
};

nlohmann::json generate(const GenOptions& o) {
    if (o.family == "sc") {
        auto [inst, p] = make_sc_instance(o.lf, o.lf / o.kappa_f, o.kappa_a,
                                          o.k_budget, o.dist);
        return instance_to_json(inst, false, o.dup_row);
    }
    if (o.family == "c") {
        auto [inst, p] = make_c_instance(o.lf, o.kappa_a, o.k_budget, o.dist);
        return instance_to_json(inst, true, o.dup_row);
    }
    if (o.family == "nc") {
        if (o.dup_row)
            throw ParameterError("gen: --dup-row applies to the sc/c families only");
        auto [inst, p] = make_nc_instance(o.lf, o.delta, o.kappa_a, o.k_budget);
        return instance_to_json(inst);
    }
    // quadratic: random SPD curvature with the requested spectrum ends,
    // random dense constraints, b picked so a point at distance `dist`
    // from the origin is feasible.
    if (o.dup_row)
        throw ParameterError("gen: --dup-row applies to the sc/c families only");
    if (o.n < 1 || o.m < 1) throw ParameterError("gen: need n, m >= 1");
    Rng rng(o.seed);
    const Index n = o.n, m = o.m;
    Matrix G(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Qo = qr.householderQ();
    const double mu = o.lf / o.kappa_f;
    Vector spec(n);
    for (Index i = 0; i < n; ++i)
        spec[i] = n == 1 ? o.lf : mu + (o.lf - mu) * double(i) / double(n - 1);
    Matrix Q = Qo * spec.asDiagonal() * Qo.transpose();
    Q = 0.5 * (Q + Matrix(Q.transpose()));
    Vector c = rng.normal_vector(n);
    Matrix B(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) B(i, j) = rng.normal();
    Vector xs = rng.normal_vector(n);
    xs *= o.dist / xs.norm();

    nlohmann::json j;
    j["f"] = {{"kind", "quadratic"}, {"Q", matrix_to_json(Q)}, {"c", vector_to_json(c)}};
    j["h"] = {{"kind", "indicator_zero"}};
    j["A"] = {{"kind", "dense"}, {"matrix", matrix_to_json(B)}};
    j["b"] = vector_to_json(Vector(B * xs));
    return j;
}

int cmd_gen(const GenOptions& o) {
    nlohmann::json j = generate(o);
    write_json_file(o.out, j);
    LoadedProblem lp = load_problem(j); // round-trip sanity before handing out
    std::printf("gen: wrote %s (family=%s, n=%lld, m=%lld)\n", o.out.c_str(),
                lp.family.c_str(), static_cast<long long>(lp.problem.A.n),
                static_cast<long long>(lp.problem.A.m));
    return 0;
}

// -------------------------------------------------------------- solve

struct SolveOptions {
    std::string alg = "sc";
    std::string instance;
    double eps = 1e-3;
    double rho = 0.0;         // c-perturb surrogate radius; 0 derives it
    long long T = 0;          // outer iterations where the method takes one
    double delta_prime = 0.0; // nc initial-gap bound; 0 reads the instance
    double D = 0.0;           // distance bound; 0 derives or defaults
    double final_gamma = 0.0; // c-appa terminal feasibility tightening
    std::string out;
    std::string trace = "csv";
    std::string timing = "off";
};

// Chain instances carry their optimum, so the distance bound every method
// wants can be derived instead of guessed.
double scale_hint(const LoadedProblem& lp, const Vector& x0, double flag) {
    if (flag > 0.0) return flag;
    if (lp.sc_chain)
        return std::max(1.0, 2.0 * (x0 - lp.sc_chain->closed_form_optimum()).norm());
    return 0.0;
}

SolverReport run_solve(const LoadedProblem& lp, const SolveOptions& o) {
    const CompositeProblem& p = lp.problem;
    const Vector& x0 = lp.x0;
    const double hint = scale_hint(lp, x0, o.D);

    if (o.alg == "agd") {
        if (!(p.f.mu_f > 0.0))
            throw NotStronglyConvexError("solve: agd needs a declared mu_f > 0");
        AgdSpec spec;
        spec.L = p.f.L_f;
        spec.mu = p.f.mu_f;
        spec.delta = o.eps;
        const double R = hint > 0.0 ? hint : std::max(1.0, 10.0 * x0.norm());
        spec.max_iters = agd_default_max_iters(spec.L, spec.mu, R, o.eps);
        OracleCounters tally;
        CompositeProblem counted = with_counters(p, tally);
        auto t0 = std::chrono::steady_clock::now();
        AgdResult r = agd(counted.f.gradient, x0, spec);
        SolverReport rep;
        rep.algorithm = "agd";
        rep.x = r.y;
        rep.tolerance = o.eps;
        rep.counters = tally;
        rep.outer_iterations = r.iters;
        rep.converged = true;
        rep.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }
    if (o.alg == "sc") {
        ScConfig sc;
        sc.epsilon = o.eps;
        sc.D = hint;
        return solve_sc(p, x0, sc);
    }
    if (o.alg == "nc") {
        NcConfig nc;
        nc.T = o.T > 0 ? o.T : 50;
        nc.delta_prime = o.delta_prime > 0.0
                             ? o.delta_prime
                             : (lp.nc_chain ? lp.nc_chain->initial_gap_bound() : 0.0);
        if (!(nc.delta_prime > 0.0))
            throw ParameterError("solve: nc needs --delta-prime for this instance");
        nc.x0 = x0;
        return solve_nc(p, nc).report;
    }
    if (o.alg == "c-perturb") {
        PerturbConfig pc;
        pc.epsilon = o.eps;
        pc.D = hint > 0.0 ? hint : std::max(1.0, 10.0 * x0.norm());
        pc.rho = o.rho;
        if (pc.rho <= 0.0 && lp.sc_chain)
            pc.rho = kkt_multiplier(p, lp.sc_chain->closed_form_optimum()).norm() + 1.0;
        if (pc.rho <= 0.0)
            throw ParameterError("solve: c-perturb needs --rho for this instance");
        return solve_c_perturb(p, x0, pc);
    }
    if (o.alg == "c-appa") {
        AppaConfig ac;
        ac.D = hint > 0.0 ? hint : std::max(1.0, 10.0 * x0.norm());
        ac.T = o.T > 0 ? o.T
                       : std::max<long long>(
                             1, static_cast<long long>(
                                    std::ceil(4.0 * ac.D * std::sqrt(p.f.L_f / o.eps))));
        ac.final_gamma = o.final_gamma;
        return solve_c_appa(p, x0, ac);
    }
    SingleLoopConfig c;
    if (o.alg == "cp") c.method = SingleLoopMethod::chambolle_pock;
    else if (o.alg == "ogda") c.method = SingleLoopMethod::ogda;
    else if (o.alg == "lalm") c.method = SingleLoopMethod::linearized_alm;
    else throw ParameterError("solve: unknown --alg '" + o.alg + "'");
    c.T = o.T > 0 ? o.T : 1000;
    if (lp.sc_chain) c.x_star = lp.sc_chain->closed_form_optimum();
    return run_single_loop(p, x0, Vector::Zero(p.A.m), c);
}

int cmd_solve(const SolveOptions& o) {
    LoadedProblem lp = load_problem(read_json_file(o.instance));
    fs::create_directories(o.out);
    SolverReport rep;
    try {
        rep = run_solve(lp, o);
    } catch (const NonConvergenceError& e) {
        // salvage what the run produced before the cap hit
        if (o.trace == "csv" && !e.trace.columns.empty())
            e.trace.write_csv((fs::path(o.out) / "trace.csv").string());
        std::fprintf(stderr, "solve: %s\n", e.what());
        return 3;
    }
    if (o.timing != "on") rep.wall_seconds = 0.0;
    write_json_file((fs::path(o.out) / "report.json").string(), report_to_json(rep));
    bool wrote_trace = false;
    if (o.trace == "csv" && !rep.trace.columns.empty()) {
        rep.trace.write_csv((fs::path(o.out) / "trace.csv").string());
        wrote_trace = true;
    }
    std::printf("solve: alg=%s converged=%d outer=%lld grad_f=%lld wrote report.json%s\n",
                rep.algorithm.c_str(), rep.converged ? 1 : 0, rep.outer_iterations,
                rep.counters.grad_f, wrote_trace ? " trace.csv" : "");
    return 0;
}

// ------------------------------------------------------------- verify

int cmd_verify(std::uint64_t seed) {
    auto checks = run_verification_suite(seed);
    bool all = true;
    for (const auto& c : checks) {
        std::printf("%s  %-28s %s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(),
                    c.detail.c_str());
        all = all && c.pass;
    }
    std::printf("%zu checks, %s\n", checks.size(), all ? "all passed" : "FAILURES");
    return all ? 0 : 4;
}

// -------------------------------------------------------------- bench

struct BenchOptions {
    std::vector<std::string> sweep; // each "key=v1,v2,..."
    std::string family = "sc";
    std::string alg = "sc";
    double eps = 1e-3;
    double lf = 1.0;
    double kappa_a = 3.0;
    double kappa_f = 8.0;
    long long k_budget = 9;
    double dist = 1.0;
    double delta = 1.0;
    long long T = 0;
    std::string timing = "off";
    std::string out;
};

struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

std::vector<SweepAxis> parse_sweeps(const std::vector<std::string>& specs) {
    std::vector<SweepAxis> axes;
    for (const std::string& s : specs) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= s.size())
            throw ParameterError("bench: --sweep expects KEY=V1,V2,... got '" + s + "'");
        SweepAxis ax;
        ax.key = s.substr(0, eq);
        if (ax.key != "kappa_a" && ax.key != "kappa_f" && ax.key != "eps" &&
            ax.key != "k_budget")
            throw ParameterError("bench: unknown sweep key '" + ax.key + "'");
        std::string rest = s.substr(eq + 1);
        size_t pos = 0;
        while (pos <= rest.size()) {
            auto comma = rest.find(',', pos);
            std::string tok = rest.substr(pos, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - pos);
            try {
                ax.values.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ParameterError("bench: bad sweep value '" + tok + "'");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (ax.values.empty())
            throw ParameterError("bench: sweep axis '" + ax.key + "' has no values");
        axes.push_back(std::move(ax));
    }
    return axes;
}

struct BenchCell {
    std::string label;
    BenchOptions cfg;
};

struct BenchRow {
    std::string label, family, alg;
    Index N = 0, d = 0;
    double kappa_a = 0, kappa_f = 0, eps = 0;
    OracleCounters counters;
    double achieved = 0.0;
    double seconds = 0.0;
};

BenchRow run_cell(const BenchCell& cell) {
    const BenchOptions& o = cell.cfg;
    BenchRow row;
    row.label = cell.label;
    row.family = o.family;
    row.alg = o.alg;
    row.eps = o.eps;
    row.kappa_a = o.kappa_a;

    if (o.family == "nc") {
        if (o.alg != "nc")
            throw ParameterError("bench: family nc pairs with --alg nc");
        auto [inst, p] = make_nc_instance(o.lf, o.delta, o.kappa_a, o.k_budget);
        row.N = inst.N;
        row.d = inst.d;
        row.kappa_f = std::numeric_limits<double>::quiet_NaN();
        NcConfig nc;
        nc.T = o.T > 0 ? o.T : 50;
        nc.delta_prime = inst.initial_gap_bound();
        NcResult r = solve_nc(p, nc);
        row.counters = r.report.counters;
        row.achieved = r.best_subopt;
        row.seconds = r.report.wall_seconds;
        return row;
    }

    const bool convex_family = o.family == "c";
    auto [inst, p] = convex_family
                         ? make_c_instance(o.lf, o.kappa_a, o.k_budget, o.dist)
                         : make_sc_instance(o.lf, o.lf / o.kappa_f, o.kappa_a,
                                            o.k_budget, o.dist);
    row.N = inst.N;
    row.d = inst.d;
    row.kappa_f = convex_family ? o.lf / inst.mu_f : o.kappa_f;
    Vector x0 = Vector::Zero(p.A.n);
    Vector x_star = inst.closed_form_optimum();
    const double D = std::max(1.0, 2.0 * o.dist);

    SolverReport rep;
    if (o.alg == "sc") {
        ScConfig sc;
        sc.epsilon = o.eps;
        sc.D = D;
        rep = solve_sc(p, x0, sc);
        row.achieved = subopt_sc(rep.x, x_star).norm;
    } else if (o.alg == "c-perturb" || o.alg == "c-appa") {
        const double rho = kkt_multiplier(p, x_star).norm() + 1.0;
        const double F_star = p.f.value(x_star);
        if (o.alg == "c-perturb") {
            PerturbConfig pc{D, o.eps, rho};
            rep = solve_c_perturb(p, x0, pc);
        } else {
            AppaConfig ac;
            ac.D = D;
            ac.T = o.T > 0 ? o.T
                           : std::max<long long>(
                                 1, static_cast<long long>(std::ceil(
                                        4.0 * D * std::sqrt(p.f.L_f / o.eps))));
            rep = solve_c_appa(p, x0, ac);
        }
        row.achieved = subopt_c(rep.x, p, rho, F_star);
    } else if (o.alg == "cp" || o.alg == "ogda" || o.alg == "lalm") {
        SingleLoopConfig c;
        c.method = o.alg == "cp"     ? SingleLoopMethod::chambolle_pock
                   : o.alg == "ogda" ? SingleLoopMethod::ogda
                                     : SingleLoopMethod::linearized_alm;
        c.T = o.T > 0 ? o.T : 1000;
        c.x_star = x_star;
        rep = run_single_loop(p, x0, Vector::Zero(p.A.m), c);
        row.achieved = subopt_sc(rep.x, x_star).norm;
    } else {
        throw ParameterError("bench: unknown --alg '" + o.alg + "'");
    }
    row.counters = rep.counters;
    row.seconds = rep.wall_seconds;
    return row;
}

int cmd_bench(const BenchOptions& base) {
    std::vector<SweepAxis> axes = parse_sweeps(base.sweep);
    std::vector<BenchCell> cells;
    std::vector<size_t> idx(axes.size(), 0);
    while (true) {
        BenchCell cell;
        cell.cfg = base;
        std::string label;
        for (size_t a = 0; a < axes.size(); ++a) {
            double v = axes[a].values[idx[a]];
            if (axes[a].key == "kappa_a") cell.cfg.kappa_a = v;
            else if (axes[a].key == "kappa_f") cell.cfg.kappa_f = v;
            else if (axes[a].key == "eps") cell.cfg.eps = v;
            else cell.cfg.k_budget = static_cast<long long>(v);
            if (!label.empty()) label += ';';
            label += axes[a].key + "=" + IterateTrace::format_value(v);
        }
        cell.label = label.empty() ? "base" : label;
        cells.push_back(std::move(cell));
        // odometer, last axis fastest
        bool done = axes.empty();
        size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < axes[a].values.size()) break;
            idx[a] = 0;
            if (a == 0) done = true;
        }
        if (done) break;
    }

    size_t nthreads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("COMPOSOLVE_THREADS")) {
        long v = std::atol(env);
        if (v >= 1) nthreads = static_cast<size_t>(v);
    }
    nthreads = std::max<size_t>(1, std::min(nthreads, cells.size()));

    std::vector<BenchRow> rows(cells.size());
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            try {
                rows[i] = run_cell(cells[i]);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    const bool timing = base.timing == "on";
    std::string csv = "# schema=composolve.bench.v1\n";
    csv += "cell,family,alg,N,d,kappa_a,kappa_f,eps,grad_f,apply_A,apply_At,prox_h,achieved";
    if (timing) csv += ",seconds";
    csv += '\n';
    auto fv = [](double v) { return IterateTrace::format_value(v); };
    for (const BenchRow& r : rows) {
        csv += r.label + ',' + r.family + ',' + r.alg + ',';
        csv += fv(double(r.N)) + ',' + fv(double(r.d)) + ',';
        csv += fv(r.kappa_a) + ',' + fv(r.kappa_f) + ',' + fv(r.eps) + ',';
        csv += fv(double(r.counters.grad_f)) + ',' + fv(double(r.counters.apply_A)) +
               ',' + fv(double(r.counters.apply_At)) + ',' +
               fv(double(r.counters.prox_h)) + ',' + fv(r.achieved);
        if (timing) csv += ',' + fv(r.seconds);
        csv += '\n';
    }
    std::ofstream f(base.out, std::ios::binary);
    if (!f) throw std::runtime_error("bench: cannot open output: " + base.out);
    f << csv;
    std::printf("bench: wrote %zu rows to %s (%zu threads)\n", rows.size(),
                base.out.c_str(), nthreads);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"composolve: solvers and worst-case instances for composite "
                 "linearly-constrained optimization"};
    app.require_subcommand(1);

    GenOptions g;
    CLI::App* gen = app.add_subcommand("gen", "generate a problem instance as JSON");
    gen->add_option("--family", g.family, "instance family")
        ->check(CLI::IsMember({"sc", "c", "nc", "quadratic"}));
    gen->add_option("--kappa-a", g.kappa_a, "target condition number of A");
    gen->add_option("--kappa-f", g.kappa_f, "target condition number of f");
    gen->add_option("--k-budget", g.k_budget, "oracle-round budget the chain is sized for");
    gen->add_option("--lf", g.lf, "gradient Lipschitz constant");
    gen->add_option("--delta", g.delta, "nc: initial objective gap bound");
    gen->add_option("--dist", g.dist, "distance from x0 to the optimum");
    gen->add_option("--n", g.n, "quadratic: variable count");
    gen->add_option("--m", g.m, "quadratic: constraint count");
    gen->add_option("--seed", g.seed, "quadratic: generator seed");
    gen->add_flag("--dup-row", g.dup_row, "duplicate constraint rows (sigma_min = 0)");
    gen->add_option("--out", g.out, "output JSON path")->required();

    SolveOptions s;
    CLI::App* solve = app.add_subcommand("solve", "run a solver on an instance");
    solve->add_option("--alg", s.alg, "solver")
        ->check(CLI::IsMember({"agd", "sc", "nc", "c-perturb", "c-appa", "cp", "ogda",
                               "lalm"}));
    solve->add_option("--instance", s.instance, "instance JSON path")->required();
    solve->add_option("--eps", s.eps, "target accuracy");
    solve->add_option("--rho", s.rho, "c-perturb: surrogate radius");
    solve->add_option("--T", s.T, "outer iteration count where the method takes one");
    solve->add_option("--delta-prime", s.delta_prime, "nc: initial objective gap bound");
    solve->add_option("--D", s.D, "distance bound override");
    solve->add_option("--final-gamma", s.final_gamma,
                      "c-appa: terminal feasibility tightening");
    solve->add_option("--out", s.out, "output directory")->required();
    solve->add_option("--trace", s.trace, "per-iteration trace output")
        ->check(CLI::IsMember({"csv", "none"}));
    solve->add_option("--timing", s.timing, "record wall-clock in report.json")
        ->check(CLI::IsMember({"on", "off"}));

    std::uint64_t verify_seed = 42;
    CLI::App* verify = app.add_subcommand("verify", "run the self-verification suite");
    verify->add_option("--seed", verify_seed, "suite seed");

    BenchOptions b;
    CLI::App* bench = app.add_subcommand("bench", "sweep a benchmark grid to CSV");
    bench->add_option("--sweep", b.sweep, "axis KEY=V1,V2,... (repeatable)");
    bench->add_option("--family", b.family, "instance family")
        ->check(CLI::IsMember({"sc", "c", "nc"}));
    bench->add_option("--alg", b.alg, "solver")
        ->check(CLI::IsMember({"sc", "nc", "c-perturb", "c-appa", "cp", "ogda", "lalm"}));
    bench->add_option("--eps", b.eps, "target accuracy");
    bench->add_option("--lf", b.lf, "gradient Lipschitz constant");
    bench->add_option("--kappa-a", b.kappa_a, "condition number of A");
    bench->add_option("--kappa-f", b.kappa_f, "condition number of f");
    bench->add_option("--k-budget", b.k_budget, "oracle-round budget");
    bench->add_option("--dist", b.dist, "distance from x0 to the optimum");
    bench->add_option("--delta", b.delta, "nc: initial objective gap bound");
    bench->add_option("--T", b.T, "outer iteration override");
    bench->add_option("--timing", b.timing, "append a wall-clock column")
        ->check(CLI::IsMember({"on", "off"}));
    bench->add_option("--out", b.out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(g);
        if (solve->parsed()) return cmd_solve(s);
        if (verify->parsed()) return cmd_verify(verify_seed);
        return cmd_bench(b);
    } catch (const NonConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
