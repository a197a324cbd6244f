#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "bdsvie/certificate.hpp"

using namespace bdsvie;

TEST_CASE("certificate arithmetic from the worked example") {
    CertificateOverrides ov;
    ov.theta = 3.0;
    const ContractionCertificate cert = build_certificate(1.0, 0.5, 1.0, ov);
    CHECK(cert.max_step == 0.75);
    CHECK(cert.partition == std::vector<double>{1.0, 0.5, 0.0});
    CHECK(std::abs(cert.lambda_factor - 5.0 / 6.0) <= 1e-15);
    CHECK(cert.a == 6.0);
}

TEST_CASE("C = 0 collapses to a single interval with Lambda = alpha") {
    const ContractionCertificate cert = build_certificate(0.0, 0.37, 2.5);
    CHECK(cert.partition == std::vector<double>{2.5, 0.0});
    CHECK(cert.lambda_factor == 0.37);
    CHECK(std::isinf(cert.max_step));
    CHECK(cert.to_json().at("max_step").is_null());
}

TEST_CASE("defaults sit at twice the lower bounds") {
    const ContractionCertificate cert = build_certificate(0.25, 0.5, 1.0);
    CHECK(cert.theta == doctest::Approx(1.0));
    CHECK(cert.a == doctest::Approx(2.0));
    CHECK(cert.max_step == doctest::Approx(2.0));
    CHECK(cert.partition.size() == 2);  // T=1 < 0.9*max_step
    CHECK(cert.lambda_factor == doctest::Approx(0.75));
}

TEST_CASE("validation names the violated inequality") {
    CHECK_THROWS_WITH_AS(build_certificate(1.0, 1.0, 1.0),
                         "alpha must lie strictly inside (0,1)", std::invalid_argument);
    CHECK_THROWS_WITH_AS(build_certificate(1.0, 0.0, 1.0),
                         "alpha must lie strictly inside (0,1)", std::invalid_argument);

    CertificateOverrides low_theta;
    low_theta.theta = 1.0;  // C/(1-alpha) = 2
    CHECK_THROWS_AS(build_certificate(1.0, 0.5, 1.0, low_theta), std::invalid_argument);

    CertificateOverrides bad_a;
    bad_a.theta = 3.0;
    bad_a.a = 2.0;
    CHECK_THROWS_AS(build_certificate(1.0, 0.5, 1.0, bad_a), std::invalid_argument);

    CHECK_THROWS_AS(build_certificate(-1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_certificate(1.0, 0.5, 0.0), std::invalid_argument);

    CertificateOverrides long_interval;
    long_interval.partition = std::vector<double>{1.0, 0.0};  // length 1 > max_step 0.375
    CHECK_THROWS_AS(build_certificate(2.0, 0.5, 1.0, long_interval), std::invalid_argument);
}

TEST_CASE("property: random admissible inputs always certify") {
    std::mt19937 rng(7031);
    std::uniform_real_distribution<double> c_dist(0.0, 5.0);
    std::uniform_real_distribution<double> alpha_dist(0.02, 0.98);
    std::uniform_real_distribution<double> t_dist(0.1, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double C = trial % 17 == 0 ? 0.0 : c_dist(rng);
        const double alpha = alpha_dist(rng);
        const double T = t_dist(rng);
        const ContractionCertificate cert = build_certificate(C, alpha, T);

        CHECK(cert.lambda_factor < 1.0);
        CHECK(cert.a > cert.theta);
        if (C > 0.0) CHECK(cert.theta > C / (1.0 - alpha));
        CHECK(cert.partition.front() == T);
        CHECK(cert.partition.back() == 0.0);
        for (std::size_t p = 0; p + 1 < cert.partition.size(); ++p) {
            const double len = cert.partition[p] - cert.partition[p + 1];
            CHECK(len > 0.0);
            CHECK(len < cert.max_step);
        }
        CHECK_NOTHROW(cert.validate());
    }
}
