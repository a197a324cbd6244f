#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bdsvie/certificate.hpp"
#include "bdsvie/problem.hpp"

namespace bdsvie {

/// Validated run configuration (one JSON document). Every key is checked
/// against the schema; unknown keys are rejected.
///
/// {
///   "problem": { "catalog": "martingale" }                  -- or inline:
///              { "k":1, "d":1, "l":1, "T":1.0, "C":0.25, "alpha":0.5,
///                "f":"0.5*sin(y1+z11)", "g":"...", "xi":"sin(wT)" }
///              (f: k expressions, g: k*l row-major, xi: k; a single string
///               is accepted for one component)
///   "solver":  { "N":32, "M":8192, "degree":2, "ridge":null, "theta":null,
///                "a":null, "partition":null, "tol":1e-4, "max_iter":25,
///                "seed":42, "threads":0, "inner_iterations":2 }
///   "output":  { "dir":"out", "formats":["csv","json"] }
///   "verify":  { "checks":["certificate","apriori","uniqueness",
///                          "contraction","oracles"] }
/// }
struct RunConfig {
    ProblemSpec problem;
    std::optional<std::string> catalog_name;

    int N{32};
    int M{8192};
    int degree{2};
    double ridge{-1.0};
    std::optional<double> theta;
    std::optional<double> a;
    std::optional<std::vector<double>> partition;
    double tol{1e-4};
    int max_iter{25};
    std::uint64_t seed{42};
    int threads{0};  // 0 = hardware
    int inner_iterations{2};

    std::string out_dir{"out"};
    std::vector<std::string> formats{"csv", "json"};
    std::vector<std::string> checks{"certificate", "apriori", "uniqueness", "contraction"};

    int resolved_threads() const;
    CertificateOverrides certificate_overrides() const;

    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig from_file(const std::string& path);
    nlohmann::json echo() const;  // normalised config for diagnostics output
};

}  // namespace bdsvie
