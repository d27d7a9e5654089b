// qfock: batch driver for the q-Fock suites. JSON config in, JSON/CSV
// report out. Exit codes: 0 all checks pass, 1 internal error, 2 parse
// error, 3 check failed, 4 precondition violated.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfock/centralizer.hpp"
#include "qfock/fock_space.hpp"
#include "qfock/fullness.hpp"
#include "qfock/modular.hpp"
#include "qfock/moments.hpp"
#include "qfock/operators.hpp"
#include "qfock/representation.hpp"

using json = nlohmann::ordered_json;
using namespace qfock;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitParse = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitPrecondition = 4;

constexpr int kCapN = 8;
constexpr std::int64_t kCapWords = 200000;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct RunConfig {
    std::string command;
    double q = 0.0;
    int N = 4;
    RepresentationSpec rep;
    double C = 1.0;
    int d = 1;
    bool has_d = false;
    bool user_constants = false;
    double user_C1 = 1.0, user_C2 = 1.0;
    std::vector<double> t_grid{0.1, 0.37, 1.0, M_PI};
    int degree_cap = 4;
    int max_order = 6;
    int num_draws = 20;
    bool compute_gap = true;
    unsigned long seed = 12345;
    int threads = 1;
    // gram dump
    bool dump = false;
    std::string dump_path, dump_format = "json";
    int dump_level = -1;  // -1: all levels
};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    std::string unknown;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) unknown += (unknown.empty() ? "" : ", ") + it.key();
    if (!unknown.empty())
        throw PreconditionError("unknown config key(s) in " + where + ": " + unknown);
}

RunConfig parse_config(const json& j, const std::string& command) {
    if (!j.is_object()) throw PreconditionError("config must be a JSON object");
    reject_unknown(j, {"command", "q", "N", "representation", "C", "d", "constants_mode",
                       "t_grid", "degree_cap", "max_order", "num_draws", "compute_gap",
                       "seed", "threads", "gram_dump"},
                   "config");
    RunConfig cfg;
    cfg.command = command;
    if (j.contains("command")) {
        if (!j["command"].is_string()) throw PreconditionError("command must be a string");
        if (j["command"].get<std::string>() != command)
            throw PreconditionError("config command '" + j["command"].get<std::string>() +
                                    "' does not match CLI command '" + command + "'");
    }
    if (j.contains("q")) {
        if (!j["q"].is_number()) throw PreconditionError("q must be a number");
        cfg.q = j["q"].get<double>();
    }
    if (!(cfg.q > -1.0 && cfg.q < 1.0))
        throw PreconditionError("q must lie in (-1,1)");
    if (j.contains("N")) {
        if (!j["N"].is_number_integer()) throw PreconditionError("N must be an integer");
        cfg.N = j["N"].get<int>();
    }
    if (cfg.N < 1) throw PreconditionError("N must be >= 1");

    cfg.rep.q = cfg.q;
    cfg.rep.fixed_dim = 1;
    if (j.contains("representation")) {
        const json& r = j["representation"];
        if (!r.is_object()) throw PreconditionError("representation must be an object");
        reject_unknown(r, {"fixed_dim", "blocks"}, "representation");
        cfg.rep.fixed_dim = 0;
        if (r.contains("fixed_dim")) {
            if (!r["fixed_dim"].is_number_integer())
                throw PreconditionError("fixed_dim must be an integer");
            cfg.rep.fixed_dim = r["fixed_dim"].get<int>();
        }
        if (r.contains("blocks")) {
            if (!r["blocks"].is_array()) throw PreconditionError("blocks must be an array");
            for (const json& b : r["blocks"]) {
                if (!b.is_object()) throw PreconditionError("each block must be an object");
                reject_unknown(b, {"lambda", "count"}, "representation.blocks[]");
                RotationBlock blk;
                if (!b.contains("lambda") || !b["lambda"].is_number())
                    throw PreconditionError("block lambda must be a number");
                blk.lambda = b["lambda"].get<double>();
                if (blk.lambda <= 1.0)
                    throw PreconditionError("block lambda must exceed 1");
                blk.count = 1;
                if (b.contains("count")) {
                    if (!b["count"].is_number_integer())
                        throw PreconditionError("block count must be an integer");
                    blk.count = b["count"].get<int>();
                }
                cfg.rep.blocks.push_back(blk);
            }
        }
        if (cfg.rep.dim_h() < 1)
            throw PreconditionError("representation must have dimension >= 1");
    }
    if (j.contains("C")) {
        if (!j["C"].is_number()) throw PreconditionError("C must be a number");
        cfg.C = j["C"].get<double>();
    }
    if (j.contains("d")) {
        if (!j["d"].is_number_integer()) throw PreconditionError("d must be an integer");
        cfg.d = j["d"].get<int>();
        cfg.has_d = true;
    }
    if (j.contains("constants_mode")) {
        const json& m = j["constants_mode"];
        if (m.is_string()) {
            if (m.get<std::string>() != "estimate")
                throw PreconditionError("constants_mode string must be \"estimate\"");
        } else if (m.is_object()) {
            reject_unknown(m, {"user", "estimate"}, "constants_mode");
            if (m.contains("user")) {
                if (!m["user"].is_array() || m["user"].size() != 2 ||
                    !m["user"][0].is_number() || !m["user"][1].is_number())
                    throw PreconditionError("constants_mode.user must be [C1, C2]");
                cfg.user_constants = true;
                cfg.user_C1 = m["user"][0].get<double>();
                cfg.user_C2 = m["user"][1].get<double>();
            }
        } else {
            throw PreconditionError("constants_mode must be \"estimate\" or {\"user\":[C1,C2]}");
        }
    }
    if (j.contains("t_grid")) {
        if (!j["t_grid"].is_array()) throw PreconditionError("t_grid must be an array");
        cfg.t_grid.clear();
        for (const json& t : j["t_grid"]) {
            if (!t.is_number()) throw PreconditionError("t_grid entries must be numbers");
            cfg.t_grid.push_back(t.get<double>());
        }
    }
    if (j.contains("degree_cap")) cfg.degree_cap = j["degree_cap"].get<int>();
    if (cfg.degree_cap < 0 || cfg.degree_cap > 8)
        throw PreconditionError("degree_cap must be in [0,8]");
    if (j.contains("max_order")) cfg.max_order = j["max_order"].get<int>();
    if (cfg.max_order < 2 || cfg.max_order > 2 * kPairingCap)
        throw PreconditionError("max_order must be in [2,16]");
    if (j.contains("num_draws")) cfg.num_draws = j["num_draws"].get<int>();
    if (cfg.num_draws < 1) throw PreconditionError("num_draws must be >= 1");
    if (j.contains("compute_gap")) {
        if (!j["compute_gap"].is_boolean())
            throw PreconditionError("compute_gap must be a boolean");
        cfg.compute_gap = j["compute_gap"].get<bool>();
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned long>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("gram_dump")) {
        const json& g = j["gram_dump"];
        if (!g.is_object()) throw PreconditionError("gram_dump must be an object");
        reject_unknown(g, {"path", "format", "level"}, "gram_dump");
        if (!g.contains("path") || !g["path"].is_string())
            throw PreconditionError("gram_dump.path is required");
        cfg.dump = true;
        cfg.dump_path = g["path"].get<std::string>();
        if (g.contains("format")) cfg.dump_format = g["format"].get<std::string>();
        if (cfg.dump_format != "json" && cfg.dump_format != "binary")
            throw PreconditionError("gram_dump.format must be json or binary");
        if (g.contains("level")) cfg.dump_level = g["level"].get<int>();
    }
    return cfg;
}

void enforce_caps(const RunConfig& cfg, bool force_large) {
    if (force_large) return;
    if (cfg.N > kCapN)
        throw PreconditionError("N = " + std::to_string(cfg.N) + " exceeds the default cap " +
                                std::to_string(kCapN) + "; pass --force-large to override");
    const int dim = cfg.rep.dim_h();
    double words = 1.0;
    for (int k = 0; k < cfg.N; ++k) words *= dim;
    if (words > static_cast<double>(kCapWords))
        throw PreconditionError("dim_H^N = " + std::to_string(static_cast<std::int64_t>(words)) +
                                " exceeds the default cap " + std::to_string(kCapWords) +
                                " words; pass --force-large to override");
}

Vector random_one_particle(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    return v;
}

double fmt_round(double v) { return v; }

json check_to_json(const Check& c) {
    return json{{"name", c.name},
                {"value", fmt_round(c.value)},
                {"bound", c.bound},
                {"tolerance", c.tolerance},
                {"pass", c.pass}};
}

// ---------------------------------------------------------------------------
// Command implementations. Each appends checks and may add extra report data.

void dump_gram(const RunConfig& cfg, const TruncatedFockSpace& F) {
    const int lo = cfg.dump_level < 0 ? 0 : cfg.dump_level;
    const int hi = cfg.dump_level < 0 ? F.N : cfg.dump_level;
    if (lo < 0 || hi > F.N) throw PreconditionError("gram_dump.level out of range");
    if (cfg.dump_format == "binary") {
        std::ofstream out(cfg.dump_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + cfg.dump_path);
        for (int n = lo; n <= hi; ++n) {
            Eigen::MatrixXd G = F.dense_gram_power(n, TruncatedFockSpace::GramPower::Plain);
            // row-major little-endian doubles
            for (std::int64_t r = 0; r < G.rows(); ++r)
                for (std::int64_t c = 0; c < G.cols(); ++c) {
                    double v = G(r, c);
                    out.write(reinterpret_cast<const char*>(&v), sizeof(double));
                }
        }
    } else {
        json levels = json::array();
        for (int n = lo; n <= hi; ++n) {
            Eigen::MatrixXd G = F.dense_gram_power(n, TruncatedFockSpace::GramPower::Plain);
            json rows = json::array();
            for (std::int64_t r = 0; r < G.rows(); ++r) {
                json row = json::array();
                for (std::int64_t c = 0; c < G.cols(); ++c) row.push_back(G(r, c));
                rows.push_back(row);
            }
            levels.push_back(json{{"level", n}, {"matrix", rows}});
        }
        std::ofstream out(cfg.dump_path);
        if (!out) throw std::runtime_error("cannot open " + cfg.dump_path);
        out << levels.dump(2) << "\n";
    }
}

void run_gram(const RunConfig& cfg, std::vector<Check>& checks, json& extra) {
    TruncatedFockSpace F = build_fock(cfg.rep.dim_h(), cfg.q, cfg.N);
    json levels = json::array();
    for (int n = 0; n <= F.N; ++n) {
        double min_eig = 1.0;
        for (const auto& cls : F.levels[n].classes)
            min_eig = std::min(min_eig, cls.min_eigenvalue);
        if (F.gram_is_identity) min_eig = 1.0;
        checks.push_back({"gram_min_eigenvalue_level_" + std::to_string(n), min_eig, 0.0, 0.0,
                          min_eig > 0.0});
        levels.push_back(json{{"level", n}, {"dim", F.levels[n].dim}, {"min_eigenvalue", min_eig}});
    }
    // oracle agreement where the naive path is affordable
    if (F.dim_h <= 3) {
        double worst = 0.0;
        for (int n = 1; n <= std::min(F.N, 5); ++n) {
            Eigen::MatrixXd a = gram_naive(F.dim_h, n, cfg.q);
            Eigen::MatrixXd b = gram_fast(F.dim_h, n, cfg.q);
            worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
        }
        checks.push_back({"gram_fast_vs_naive_max_abs_diff", worst, 0.0, 1e-12, worst < 1e-12});
    }
    extra["levels"] = levels;
    extra["total_dim"] = F.total_dim;
    if (cfg.dump) {
        dump_gram(cfg, F);
        extra["gram_dump_path"] = cfg.dump_path;
    }
}

void run_norms(const RunConfig& cfg, std::vector<Check>& checks, json& extra,
               std::mt19937_64& rng) {
    Representation rep = build_representation(cfg.rep);
    TruncatedFockSpace F = build_fock(rep.dim_h, cfg.q, cfg.N);
    Vector e = Vector::Zero(rep.dim_h);
    e[0] = 1.0;
    const double norm = operator_norm_q(F, creation_left(F, rep, e));
    const double law = cfg.q >= 0.0 ? 1.0 / std::sqrt(1.0 - cfg.q) : 1.0;
    // the truncated norm approaches the law from below
    checks.push_back({"creation_norm_vs_law", norm, law, 1e-10, norm <= law + 1e-10});
    extra["creation_norm"] = norm;
    extra["norm_law"] = law;

    double worst = 0.0;
    for (int t = 0; t < cfg.num_draws; ++t) {
        Vector xi = random_one_particle(rep.dim_h, rng);
        double r = (annihilation_left(F, rep, xi).mat -
                    adjoint_q(F, creation_left(F, rep, xi)).mat)
                       .cwiseAbs()
                       .maxCoeff();
        worst = std::max(worst, r);
        r = (annihilation_right(F, rep, xi).mat -
             adjoint_q(F, creation_right(F, rep, xi)).mat)
                .cwiseAbs()
                .maxCoeff();
        worst = std::max(worst, r);
    }
    checks.push_back({"adjoint_coherence_max_residual", worst, 0.0, 1e-10, worst < 1e-10});
}

void run_modular(const RunConfig& cfg, std::vector<Check>& checks, json& extra,
                 std::mt19937_64& rng) {
    Representation rep = build_representation(cfg.rep);
    TruncatedFockSpace F = build_fock(rep.dim_h, cfg.q, cfg.N);

    // structural identities
    double worst_j2 = 0.0, worst_jdj = 0.0;
    const Vector dp = delta_power_diagonal(F, rep, 1.0);
    const Vector dm = delta_power_diagonal(F, rep, -1.0);
    std::normal_distribution<double> gauss;
    for (int t = 0; t < 5; ++t) {
        FockVector v(F.total_dim);
        for (std::int64_t i = 0; i < F.total_dim; ++i)
            v[i] = Complex(gauss(rng), gauss(rng));
        const double nv = v.norm();
        worst_j2 = std::max(
            worst_j2,
            (modular_conjugation(F, rep, modular_conjugation(F, rep, v)) - v).norm() / nv);
        FockVector jdj = modular_conjugation(
            F, rep, FockVector(dp.cwiseProduct(modular_conjugation(F, rep, v))));
        worst_jdj =
            std::max(worst_jdj, (jdj - FockVector(dm.cwiseProduct(v))).norm() / nv);
    }
    checks.push_back({"J_squared_residual", worst_j2, 0.0, 1e-12, worst_j2 < 1e-12});
    checks.push_back({"JDeltaJ_vs_inverse_residual", worst_jdj, 0.0, 1e-12, worst_jdj < 1e-12});

    const int max_len = std::min(3, F.N - 1);
    double worst_tomita = 0.0, worst_flow = 0.0;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Vector> xis;
        for (int k = 0; k < len; ++k) xis.push_back(random_one_particle(rep.dim_h, rng));
        FockOperator w = wick_word(F, rep, xis);
        worst_tomita = std::max(worst_tomita, tomita_residual(F, rep, w));
        for (double t : cfg.t_grid) {
            std::vector<Vector> rot;
            for (const auto& xi : xis) rot.push_back(apply_U(rep, -t, xi));
            double r = (modular_flow(F, rep, t, w).mat - wick_word(F, rep, rot).mat)
                           .cwiseAbs()
                           .maxCoeff();
            worst_flow = std::max(worst_flow, r);
        }
    }
    checks.push_back(
        {"tomita_max_residual", worst_tomita, 0.0, 1e-8, worst_tomita < 1e-8});
    checks.push_back(
        {"flow_vs_rotation_max_residual", worst_flow, 0.0, 1e-8, worst_flow < 1e-8});

    // KMS on eigen-letter pairs
    double worst_kms = 0.0;
    for (int i = 0; i < rep.dim_h; ++i) {
        Vector a = Vector::Zero(rep.dim_h);
        a[i] = 1.0;
        Vector b = rep.apply_I(a);
        worst_kms = std::max(
            worst_kms, kms_residual(F, rep, wick(F, rep, a), wick(F, rep, b)));
    }
    checks.push_back({"kms_max_residual", worst_kms, 0.0, 1e-8, worst_kms < 1e-8});
    extra["wick_word_max_length"] = max_len;
}

void run_moments(const RunConfig& cfg, std::vector<Check>& checks, json& extra,
                 std::mt19937_64& rng) {
    Representation rep = build_representation(cfg.rep);
    TruncatedFockSpace F = build_fock(rep.dim_h, cfg.q, cfg.N);
    Vector e = Vector::Zero(rep.dim_h);
    e[0] = 1.0;
    json table = json::array();
    FockOperator w = wick(F, rep, e);
    Matrix prod = Matrix::Identity(F.total_dim, F.total_dim);
    for (int order = 1; order <= cfg.max_order; ++order) {
        prod = prod * w.mat;
        if (order % 2 != 0) continue;
        const Complex oracle =
            moment_pairing_formula(rep, cfg.q, std::vector<Vector>(order, e));
        double diff = 1.0;
        if (order <= F.N * 2) {  // dense value exact when paths fit the truncation
            const Complex dense = vacuum_state(F, {&F, prod, ""});
            diff = std::abs(dense - oracle);
            checks.push_back({"moment_oracle_agreement_" + std::to_string(order), diff, 0.0,
                              1e-10, diff < 1e-10});
        }
        table.push_back(json{{"order", order}, {"value", std::real(oracle)}});
    }
    // mixed random eigen-letters
    double worst = 0.0;
    std::uniform_int_distribution<int> pick(0, rep.dim_h - 1);
    for (int t = 0; t < cfg.num_draws; ++t) {
        const int two_n = 2 * (1 + t % std::min(3, F.N));
        std::vector<Vector> xis;
        Matrix p = Matrix::Identity(F.total_dim, F.total_dim);
        for (int k = 0; k < two_n; ++k) {
            Vector xi = Vector::Zero(rep.dim_h);
            xi[pick(rng)] = 1.0;
            xis.push_back(xi);
            p = p * wick(F, rep, xi).mat;
        }
        worst = std::max(worst, std::abs(vacuum_state(F, {&F, p, ""}) -
                                         moment_pairing_formula(rep, cfg.q, xis)));
    }
    checks.push_back({"mixed_moment_oracle_max_diff", worst, 0.0, 1e-10, worst < 1e-10});
    extra["moment_table"] = table;
}

void run_centralizer(const RunConfig& cfg, std::vector<Check>& checks, json& extra) {
    Representation rep = build_representation(cfg.rep);
    TruncatedFockSpace F = build_fock(rep.dim_h, cfg.q, cfg.N);

    std::vector<double> lambdas;
    std::vector<Vector> xis;
    int idx = cfg.rep.fixed_dim;
    for (const auto& b : cfg.rep.blocks)
        for (int c = 0; c < b.count; ++c) {
            lambdas.push_back(b.lambda);
            Vector xi = Vector::Zero(rep.dim_h);
            xi[idx] = 1.0;
            xis.push_back(xi);
            idx += 2;
        }
    if (lambdas.empty())
        throw PreconditionError(
            "centralizer command needs at least one rotation block in the representation");

    auto monos = stable_monomials(lambdas, cfg.degree_cap);
    extra["stable_monomial_count"] = monos.size();
    json names = json::array();
    for (const auto& m : monos) names.push_back(monomial_to_string(m));
    extra["stable_monomials"] = names;

    // realize the stable polynomial summing the first few monomials, check
    // centralizer membership and the trace property
    // keep each polynomial's degree <= N so the product's vacuum paths fit
    // the truncation and the trace identity is exact
    StablePolynomial p1{lambdas, {}}, p2{lambdas, {}};
    std::size_t taken = 0;
    for (const auto& m : monos) {
        if (static_cast<int>(m.size()) > cfg.N) continue;
        (taken % 2 == 0 ? p1 : p2).terms.push_back({1.0, m});
        if (++taken == 12) break;
    }
    if (p1.terms.empty()) p1.terms.push_back({1.0, {}});
    if (p2.terms.empty()) p2.terms.push_back({1.0, {}});
    FockOperator a = realize_stable(F, rep, p1, xis);
    FockOperator b = realize_stable(F, rep, p2, xis);
    const double ra = flow_invariance_residual(F, rep, a);
    const double rb = flow_invariance_residual(F, rep, b);
    checks.push_back({"flow_invariance_residual_p1", ra, 0.0, 1e-8, ra < 1e-8});
    checks.push_back({"flow_invariance_residual_p2", rb, 0.0, 1e-8, rb < 1e-8});
    const double tr = std::abs((a.mat * b.mat)(0, 0) - (b.mat * a.mat)(0, 0));
    checks.push_back({"trace_commutator", tr, 0.0, 1e-8, tr < 1e-8});
}

void run_fullness(const RunConfig& cfg, std::vector<Check>& checks, json& extra) {
    FullnessConfig fc;
    fc.rep = cfg.rep;
    fc.C = cfg.C;
    fc.d = cfg.d;
    fc.N = cfg.N;
    fc.user_constants = cfg.user_constants;
    fc.user_C1 = cfg.user_C1;
    fc.user_C2 = cfg.user_C2;
    fc.compute_gap = cfg.compute_gap;
    FullnessCertificate cert = certify_fullness(fc);
    checks.push_back({"fullness_criterion_margin", cert.margin, 0.0, 0.0,
                      cert.inequality_holds});
    if (cert.spectral_gap_computed)
        checks.push_back({"spectral_gap_positive", cert.spectral_gap, 0.0, 0.0,
                          cert.spectral_gap > 0.0});
    extra["certificate"] = json{{"C1_used", cert.C1_used},
                                {"C2_used", cert.C2_used},
                                {"constants_provenance", cert.constants_provenance},
                                {"lhs", cert.lhs},
                                {"rhs", cert.rhs},
                                {"inequality_holds", cert.inequality_holds},
                                {"margin", cert.margin},
                                {"proof_bound", cert.proof_bound},
                                {"spectral_gap_computed", cert.spectral_gap_computed},
                                {"spectral_gap", cert.spectral_gap},
                                {"gap_method", cert.gap_method}};
}

std::string format_csv(const RunConfig& cfg, const std::vector<Check>& checks,
                       const json& extra) {
    char buf[128];
    std::string out;
    if (cfg.command == "moments" && extra.contains("moment_table")) {
        out = "order, moment\n";
        for (const auto& row : extra["moment_table"]) {
            std::snprintf(buf, sizeof(buf), "%d, %.12g\n", row["order"].get<int>(),
                          row["value"].get<double>());
            out += buf;
        }
        return out;
    }
    out = "name, value, bound, tolerance, pass\n";
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof(buf), ", %.12g, %.12g, %.12g, %s\n", c.value, c.bound,
                      c.tolerance, c.pass ? "true" : "false");
        out += c.name + buf;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-deformed Fock space checks and fullness certification"};
    app.require_subcommand(1);
    std::string config_path, out_path, format = "json";
    long long seed_override = -1;
    int threads_override = 0;
    bool force_large = false;
    const std::vector<std::string> commands{"gram",       "norms",   "modular", "moments",
                                            "centralizer", "fullness", "all"};
    for (const auto& name : commands) app.add_subcommand(name)->fallthrough();
    app.add_option("--config", config_path, "path to the JSON run configuration")->required();
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--format", format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", threads_override, "worker thread count");
    app.add_option("--seed", seed_override, "override the config RNG seed");
    app.add_flag("--force-large", force_large, "lift the N and word-count caps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    json report;
    int exit_code = 0;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config " << config_path << "\n";
            return kExitParse;
        }
        json raw;
        try {
            raw = json::parse(in);
        } catch (const json::parse_error& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return kExitParse;
        }
        RunConfig cfg = parse_config(raw, command);
        if (seed_override >= 0) cfg.seed = static_cast<unsigned long>(seed_override);
        if (threads_override > 0) cfg.threads = threads_override;
        enforce_caps(cfg, force_large);
        Eigen::setNbThreads(cfg.threads);

        std::vector<Check> checks;
        json extra = json::object();
        json timing = json::object();
        std::mt19937_64 rng(cfg.seed);
        const auto t0 = std::chrono::steady_clock::now();
        auto phase = [&](const std::string& name, auto&& fn) {
            const auto s = std::chrono::steady_clock::now();
            fn();
            timing[name + "_ms"] =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - s)
                    .count();
        };

        if (command == "gram" || command == "all")
            phase("gram", [&] { run_gram(cfg, checks, extra); });
        if (command == "norms" || command == "all")
            phase("norms", [&] { run_norms(cfg, checks, extra, rng); });
        if (command == "modular" || command == "all")
            phase("modular", [&] { run_modular(cfg, checks, extra, rng); });
        if (command == "moments" || command == "all")
            phase("moments", [&] { run_moments(cfg, checks, extra, rng); });
        if (command == "centralizer" || (command == "all" && !cfg.rep.blocks.empty()))
            phase("centralizer", [&] { run_centralizer(cfg, checks, extra); });
        if (command == "fullness" || (command == "all" && cfg.has_d))
            phase("fullness", [&] { run_fullness(cfg, checks, extra); });
        timing["total_ms"] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();

        bool all_pass = true;
        for (const auto& c : checks) all_pass = all_pass && c.pass;
        exit_code = all_pass ? 0 : kExitCheckFailed;

        report["command"] = command;
        report["inputs"] = raw;
        report["seed"] = cfg.seed;
        report["threads"] = cfg.threads;
        json jchecks = json::array();
        for (const auto& c : checks) jchecks.push_back(check_to_json(c));
        report["checks"] = jchecks;
        report["extra"] = extra;
        report["all_checks_pass"] = all_pass;
        report["timing"] = timing;

        std::string payload =
            format == "csv" ? format_csv(cfg, checks, extra) : report.dump(2) + "\n";
        if (out_path.empty()) {
            std::cout << payload;
        } else {
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot open output path " + out_path);
            out << payload;
        }
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::invalid_argument& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return exit_code;
}
