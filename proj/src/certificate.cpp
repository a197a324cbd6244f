#include "bdsvie/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bdsvie {

double ContractionCertificate::max_interval_length() const {
    double longest = 0.0;
    for (std::size_t p = 0; p + 1 < partition.size(); ++p)
        longest = std::max(longest, partition[p] - partition[p + 1]);
    return longest;
}

void ContractionCertificate::validate() const {
    if (!(lip_c >= 0.0)) throw std::invalid_argument("C must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie strictly inside (0,1)");
    if (!(horizon > 0.0)) throw std::invalid_argument("T must be positive");
    if (lip_c > 0.0 && !(theta > lip_c / (1.0 - alpha)))
        throw std::invalid_argument("theta must exceed C/(1-alpha) strictly");
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!(a > theta)) throw std::invalid_argument("a must exceed theta strictly");
    if (partition.size() < 2) throw std::invalid_argument("partition needs at least two points");
    if (partition.front() != horizon || partition.back() != 0.0)
        throw std::invalid_argument("partition must run from T down to 0");
    for (std::size_t p = 0; p + 1 < partition.size(); ++p) {
        const double len = partition[p] - partition[p + 1];
        if (!(len > 0.0)) throw std::invalid_argument("partition must be strictly decreasing");
        if (!(len < max_step))
            throw std::invalid_argument(
                "every interval length must stay strictly below theta/(C(1+theta))");
    }
    if (!(lambda_factor < 1.0))
        throw std::invalid_argument("contraction factor Lambda must be strictly below 1");
}

nlohmann::json ContractionCertificate::to_json() const {
    nlohmann::json j;
    j["C"] = lip_c;
    j["alpha"] = alpha;
    j["T"] = horizon;
    j["theta"] = theta;
    j["a"] = a;
    j["lambda"] = lambda_factor;
    if (std::isfinite(max_step))
        j["max_step"] = max_step;
    else
        j["max_step"] = nullptr;  // C = 0: no step bound
    j["partition"] = partition;
    j["n_intervals"] = n_intervals();
    return j;
}

ContractionCertificate build_certificate(double C, double alpha, double T,
                                         const CertificateOverrides& overrides) {
    if (!(C >= 0.0)) throw std::invalid_argument("C must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie strictly inside (0,1)");
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");

    ContractionCertificate cert;
    cert.lip_c = C;
    cert.alpha = alpha;
    cert.horizon = T;
    cert.theta = overrides.theta.value_or(C > 0.0 ? 2.0 * C / (1.0 - alpha) : 1.0);
    cert.a = overrides.a.value_or(2.0 * cert.theta);
    cert.max_step =
        C > 0.0 ? cert.theta / (C * (1.0 + cert.theta)) : std::numeric_limits<double>::infinity();

    if (overrides.partition) {
        cert.partition = *overrides.partition;
    } else {
        const double limit = std::isfinite(cert.max_step) ? 0.9 * cert.max_step : T;
        const double target = std::min(limit, T);
        const int q = std::max(1, static_cast<int>(std::ceil(T / target - 1e-12)));
        cert.partition.resize(static_cast<std::size_t>(q) + 1);
        for (int p = 0; p <= q; ++p)
            cert.partition[static_cast<std::size_t>(p)] = T * (q - p) / q;
        cert.partition.front() = T;
        cert.partition.back() = 0.0;
    }

    const double longest = cert.max_interval_length();
    cert.lambda_factor =
        std::max(longest * C * (1.0 / cert.theta + 1.0), C / cert.theta + alpha);

    cert.validate();
    return cert;
}

}  // namespace bdsvie
