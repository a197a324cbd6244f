#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bdsvie {

struct CertificateOverrides {
    std::optional<double> theta;
    std::optional<double> a;
    std::optional<std::vector<double>> partition;  // decreasing, T ... 0
};

/// Admissible contraction parameters for the Picard iteration:
/// theta > C/(1-alpha), a > theta, every interval shorter than
/// max_step = theta/(C(1+theta)), and
/// Lambda = max(L*C*(1/theta+1), C/theta + alpha) < 1 with L the longest
/// interval. For C = 0 the step bound is vacuous and Lambda = alpha.
struct ContractionCertificate {
    double lip_c{0.0};
    double alpha{0.5};
    double horizon{1.0};
    double theta{1.0};
    double a{2.0};
    double lambda_factor{0.0};
    double max_step{0.0};  // +inf when C = 0
    std::vector<double> partition;

    int n_intervals() const { return static_cast<int>(partition.size()) - 1; }
    double max_interval_length() const;

    /// Throws std::invalid_argument naming the violated strict inequality.
    void validate() const;

    nlohmann::json to_json() const;
};

/// Defaults: theta = 2C/(1-alpha) (1 when C = 0), a = 2*theta, equal
/// intervals of length at most min(0.9*max_step, T).
ContractionCertificate build_certificate(double C, double alpha, double T,
                                         const CertificateOverrides& overrides = {});

}  // namespace bdsvie
