#include "bdsvie/run_config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bdsvie/catalog.hpp"
#include "bdsvie/expression.hpp"
#include "bdsvie/parallel.hpp"

namespace bdsvie {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

std::vector<std::string> expression_list(const json& value, int expected,
                                         const std::string& what) {
    std::vector<std::string> out;
    if (value.is_string()) {
        out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
        for (const auto& e : value) {
            if (!e.is_string())
                throw std::invalid_argument("config: " + what + " entries must be strings");
            out.push_back(e.get<std::string>());
        }
    } else {
        throw std::invalid_argument("config: " + what +
                                    " must be a string or an array of strings");
    }
    if (static_cast<int>(out.size()) != expected)
        throw std::invalid_argument("config: " + what + " needs " + std::to_string(expected) +
                                    " component expression(s), got " +
                                    std::to_string(out.size()));
    return out;
}

// Wraps k (or k*l) parsed component expressions into one vectorised
// coefficient callback.
CoefficientFn coefficient_from_expressions(std::vector<ExpressionAst> components, int k,
                                           int cols_per_component) {
    const int cols = k * cols_per_component;
    return [components = std::move(components), cols](
               double t, double s, const Eigen::Ref<const Eigen::MatrixXd>& y,
               const Eigen::Ref<const Eigen::MatrixXd>& z, Eigen::MatrixXd& out) {
        const Eigen::Index M = y.rows();
        out.resize(M, cols);
        std::vector<double> yv(static_cast<std::size_t>(y.cols()));
        std::vector<double> zv(static_cast<std::size_t>(z.cols()));
        for (Eigen::Index m = 0; m < M; ++m) {
            for (Eigen::Index c = 0; c < y.cols(); ++c)
                yv[static_cast<std::size_t>(c)] = y(m, c);
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                zv[static_cast<std::size_t>(c)] = z(m, c);
            for (int q = 0; q < cols; ++q)
                out(m, q) = components[static_cast<std::size_t>(q)].evaluate(t, s, yv, zv, {});
        }
    };
}

TerminalFn terminal_from_expressions(std::vector<ExpressionAst> components, int k) {
    return [components = std::move(components), k](const BrownianEnsemble& ens) {
        const int M = ens.n_paths();
        const int N = ens.grid().n_steps;
        Eigen::MatrixXd out(M, k);
        std::vector<double> wT(static_cast<std::size_t>(ens.dim_w()));
        for (int m = 0; m < M; ++m) {
            for (int c = 0; c < ens.dim_w(); ++c)
                wT[static_cast<std::size_t>(c)] = ens.w(N, m, c);
            for (int a = 0; a < k; ++a)
                out(m, a) = components[static_cast<std::size_t>(a)].evaluate(0.0, 0.0, {}, {}, wT);
        }
        return out;
    };
}

ProblemSpec problem_from_json(const json& obj, std::optional<std::string>& catalog_name) {
    if (!obj.is_object()) throw std::invalid_argument("config: 'problem' must be an object");
    if (obj.contains("catalog")) {
        reject_unknown_keys(obj, {"catalog"}, "problem");
        catalog_name = obj.at("catalog").get<std::string>();
        return catalog_problem(*catalog_name).spec;
    }
    reject_unknown_keys(obj, {"k", "d", "l", "T", "C", "alpha", "f", "g", "xi"}, "problem");
    for (const char* key : {"f", "g", "xi", "C", "alpha", "T"})
        if (!obj.contains(key))
            throw std::invalid_argument(std::string("config: problem is missing '") + key + "'");

    ProblemSpec spec;
    spec.name = "inline";
    spec.k = obj.value("k", 1);
    spec.d = obj.value("d", 1);
    spec.l = obj.value("l", 1);
    spec.T = obj.at("T").get<double>();
    spec.lip_c = obj.at("C").get<double>();
    spec.alpha = obj.at("alpha").get<double>();

    const ExprDims dims{spec.k, spec.d, spec.l};
    std::vector<ExpressionAst> f_asts, g_asts, xi_asts;
    bool f_yz = false, g_yz = false;
    for (const std::string& text : expression_list(obj.at("f"), spec.k, "problem.f")) {
        f_asts.push_back(ExpressionAst::parse(text, ExprSlot::F, dims));
        f_yz = f_yz || f_asts.back().uses_y() || f_asts.back().uses_z();
    }
    for (const std::string& text :
         expression_list(obj.at("g"), spec.k * spec.l, "problem.g")) {
        g_asts.push_back(ExpressionAst::parse(text, ExprSlot::G, dims));
        g_yz = g_yz || g_asts.back().uses_y() || g_asts.back().uses_z();
    }
    for (const std::string& text : expression_list(obj.at("xi"), spec.k, "problem.xi"))
        xi_asts.push_back(ExpressionAst::parse(text, ExprSlot::Xi, dims));

    spec.f = coefficient_from_expressions(std::move(f_asts), spec.k, 1);
    spec.g = coefficient_from_expressions(std::move(g_asts), spec.k, spec.l);
    spec.xi = terminal_from_expressions(std::move(xi_asts), spec.k);
    spec.f_depends_on_yz = f_yz;
    spec.g_depends_on_yz = g_yz;
    spec.validate();
    return spec;
}

const std::set<std::string> kKnownChecks = {"certificate", "apriori", "uniqueness",
                                            "contraction", "oracles"};

}  // namespace

int RunConfig::resolved_threads() const { return resolve_threads(threads); }

CertificateOverrides RunConfig::certificate_overrides() const {
    CertificateOverrides ov;
    ov.theta = theta;
    ov.a = a;
    ov.partition = partition;
    return ov;
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
    reject_unknown_keys(doc, {"problem", "solver", "output", "verify"}, "the config root");
    if (!doc.contains("problem"))
        throw std::invalid_argument("config: missing 'problem' section");

    RunConfig cfg;
    cfg.problem = problem_from_json(doc.at("problem"), cfg.catalog_name);

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        reject_unknown_keys(s,
                            {"N", "M", "degree", "ridge", "theta", "a", "partition", "tol",
                             "max_iter", "seed", "threads", "inner_iterations"},
                            "solver");
        cfg.N = s.value("N", cfg.N);
        cfg.M = s.value("M", cfg.M);
        cfg.degree = s.value("degree", cfg.degree);
        if (s.contains("ridge") && !s.at("ridge").is_null())
            cfg.ridge = s.at("ridge").get<double>();
        if (s.contains("theta") && !s.at("theta").is_null())
            cfg.theta = s.at("theta").get<double>();
        if (s.contains("a") && !s.at("a").is_null()) cfg.a = s.at("a").get<double>();
        if (s.contains("partition") && !s.at("partition").is_null())
            cfg.partition = s.at("partition").get<std::vector<double>>();
        cfg.tol = s.value("tol", cfg.tol);
        cfg.max_iter = s.value("max_iter", cfg.max_iter);
        cfg.seed = s.value("seed", cfg.seed);
        cfg.threads = s.value("threads", cfg.threads);
        cfg.inner_iterations = s.value("inner_iterations", cfg.inner_iterations);
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        reject_unknown_keys(o, {"dir", "formats"}, "output");
        cfg.out_dir = o.value("dir", cfg.out_dir);
        if (o.contains("formats")) cfg.formats = o.at("formats").get<std::vector<std::string>>();
        for (const std::string& f : cfg.formats)
            if (f != "csv" && f != "json")
                throw std::invalid_argument("config: unknown output format '" + f + "'");
    }
    if (doc.contains("verify")) {
        const json& v = doc.at("verify");
        reject_unknown_keys(v, {"checks"}, "verify");
        if (v.contains("checks")) {
            cfg.checks = v.at("checks").get<std::vector<std::string>>();
            for (const std::string& c : cfg.checks)
                if (!kKnownChecks.count(c))
                    throw std::invalid_argument("config: unknown check '" + c + "'");
        }
    }

    if (cfg.N < 1) throw std::invalid_argument("config: solver.N must be at least 1");
    if (cfg.M < 1) throw std::invalid_argument("config: solver.M must be at least 1");
    if (cfg.degree < 0) throw std::invalid_argument("config: solver.degree must be nonnegative");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("config: solver.tol must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("config: solver.max_iter must be >= 1");
    if (cfg.inner_iterations < 1)
        throw std::invalid_argument("config: solver.inner_iterations must be >= 1");
    if (cfg.threads < 0) throw std::invalid_argument("config: solver.threads must be >= 0");
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: JSON parse error in '" + path + "': " + e.what());
    }
    return from_json(doc);
}

nlohmann::json RunConfig::echo() const {
    json j;
    if (catalog_name)
        j["problem"] = {{"catalog", *catalog_name}};
    else
        j["problem"] = {{"k", problem.k}, {"d", problem.d}, {"l", problem.l},
                        {"T", problem.T}, {"C", problem.lip_c}, {"alpha", problem.alpha}};
    j["solver"] = {{"N", N},
                   {"M", M},
                   {"degree", degree},
                   {"ridge", ridge < 0.0 ? json() : json(ridge)},
                   {"theta", theta ? json(*theta) : json()},
                   {"a", a ? json(*a) : json()},
                   {"partition", partition ? json(*partition) : json()},
                   {"tol", tol},
                   {"max_iter", max_iter},
                   {"seed", seed},
                   {"threads", threads},
                   {"inner_iterations", inner_iterations}};
    j["output"] = {{"dir", out_dir}, {"formats", formats}};
    return j;
}

}  // namespace bdsvie
