#include "bdsvie/regression.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace bdsvie {

namespace {

// Multi-indices over q variables with total degree <= p, graded, W block
// before B block inside each degree: 1, v1, v2, ..., v1^2, v1 v2, ...
void enumerate_exponents(int q, int degree, std::vector<std::vector<int>>& out) {
    std::vector<int> current(static_cast<std::size_t>(q), 0);
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == q) {
            out.push_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[static_cast<std::size_t>(var)] = e;
            rec(var + 1, remaining - e);
        }
        current[static_cast<std::size_t>(var)] = 0;
    };
    for (int total = 0; total <= degree; ++total) rec(0, total);
}

double rcond_of(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (dmax <= 0.0) return 0.0;
    return dmin / dmax;
}

}  // namespace

int basis_feature_count(int dim_w, int dim_b, int degree) {
    const int q = dim_w + dim_b;
    // C(q + p, p)
    long long count = 1;
    for (int i = 1; i <= degree; ++i) count = count * (q + i) / i;
    return static_cast<int>(count);
}

Eigen::MatrixXd build_basis(const BrownianEnsemble& ens, int i, int degree) {
    if (i < 0 || i > ens.grid().n_steps)
        throw std::out_of_range("build_basis: index out of range");
    if (degree < 0) throw std::invalid_argument("build_basis: degree must be nonnegative");
    const int M = ens.n_paths();
    const int d = ens.dim_w();
    const int l = ens.dim_b();
    const int q = d + l;
    const int N = ens.grid().n_steps;

    Eigen::MatrixXd vars(M, q);
    vars.leftCols(d) = ens.w_at(i);
    vars.rightCols(l) = ens.b_at(N) - ens.b_at(i);

    std::vector<std::vector<int>> exponents;
    enumerate_exponents(q, degree, exponents);

    Eigen::MatrixXd features(M, static_cast<int>(exponents.size()));
    for (int col = 0; col < features.cols(); ++col) {
        Eigen::ArrayXd acc = Eigen::ArrayXd::Ones(M);
        const auto& exps = exponents[static_cast<std::size_t>(col)];
        for (int v = 0; v < q; ++v)
            for (int e = 0; e < exps[static_cast<std::size_t>(v)]; ++e)
                acc *= vars.col(v).array();
        features.col(col) = acc.matrix();
    }
    return features;
}

ConditionalEstimate estimate_conditional(const Eigen::MatrixXd& targets,
                                         const Eigen::MatrixXd& features, double ridge) {
    const Eigen::Index M = features.rows();
    const Eigen::Index nf = features.cols();
    if (targets.rows() != M)
        throw std::invalid_argument("estimate_conditional: row count mismatch");
    if (M < nf)
        throw std::invalid_argument("estimate_conditional: need at least n_features paths");

    Eigen::MatrixXd gram = features.transpose() * features;
    const double eps = ridge < 0.0 ? 1e-8 * gram.trace() / static_cast<double>(nf) : ridge;
    gram.diagonal().array() += eps;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const double rcond = rcond_of(ldlt);
    if (ldlt.info() != Eigen::Success || (eps == 0.0 && rcond < 1e-12))
        throw std::runtime_error("estimate_conditional: Gram matrix is ill-conditioned");

    ConditionalEstimate result;
    result.coefficients = ldlt.solve(features.transpose() * targets);
    result.predictions = features * result.coefficients;
    result.residual_second_moment =
        (targets - result.predictions).squaredNorm() / static_cast<double>(M);
    result.gram_rcond = rcond;
    return result;
}

RegressionContext::RegressionContext(const BrownianEnsemble& ens, int degree, double ridge)
    : ens_(&ens), degree_(degree) {
    if (degree < 0) throw std::invalid_argument("RegressionContext: degree must be nonnegative");
    n_features_ = basis_feature_count(ens.dim_w(), ens.dim_b(), degree);
    if (ens.n_paths() < n_features_)
        throw std::invalid_argument("RegressionContext: need at least n_features paths");
    const int N = ens.grid().n_steps;
    features_.reserve(static_cast<std::size_t>(N) + 1);
    gram_.reserve(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        features_.push_back(build_basis(ens, i, degree));
        Eigen::MatrixXd gram = features_.back().transpose() * features_.back();
        const double eps =
            ridge < 0.0 ? 1e-8 * gram.trace() / static_cast<double>(n_features_) : ridge;
        gram.diagonal().array() += eps;
        gram_.emplace_back(gram);
        if (gram_.back().info() != Eigen::Success ||
            (eps == 0.0 && rcond_of(gram_.back()) < 1e-12))
            throw std::runtime_error("RegressionContext: Gram matrix is ill-conditioned at index " +
                                     std::to_string(i));
    }
}

Eigen::MatrixXd RegressionContext::fit(int i, const Eigen::MatrixXd& targets) const {
    const auto& F = features_[static_cast<std::size_t>(i)];
    return F * gram_[static_cast<std::size_t>(i)].solve(F.transpose() * targets);
}

Eigen::MatrixXd RegressionContext::martingale_coefficient(int j,
                                                          const Eigen::MatrixXd& targets) const {
    if (j < 0 || j >= ens_->grid().n_steps)
        throw std::out_of_range("martingale_coefficient: step index out of range");
    const int k = static_cast<int>(targets.cols());
    const int d = ens_->dim_w();
    const double dt = ens_->grid().dt;

    const Eigen::MatrixXd centred = targets - fit(j, targets);
    const Eigen::MatrixXd dw = ens_->w_increment(j);

    Eigen::MatrixXd out(targets.rows(), k * d);
    Eigen::MatrixXd products(targets.rows(), k);
    for (int b = 0; b < d; ++b) {
        for (int a = 0; a < k; ++a)
            products.col(a) = centred.col(a).cwiseProduct(dw.col(b));
        const Eigen::MatrixXd fitted = fit(j, products);
        for (int a = 0; a < k; ++a) out.col(a * d + b) = fitted.col(a) / dt;
    }
    return out;
}

Eigen::MatrixXd estimate_martingale_coefficient(const Eigen::MatrixXd& targets,
                                                const BrownianEnsemble& ens, int j, int degree,
                                                double ridge) {
    if (j < 0 || j >= ens.grid().n_steps)
        throw std::out_of_range("estimate_martingale_coefficient: step index out of range");
    const int k = static_cast<int>(targets.cols());
    const int d = ens.dim_w();
    const double dt = ens.grid().dt;
    const Eigen::MatrixXd features = build_basis(ens, j, degree);

    const Eigen::MatrixXd centred =
        targets - estimate_conditional(targets, features, ridge).predictions;
    const Eigen::MatrixXd dw = ens.w_increment(j);

    Eigen::MatrixXd out(targets.rows(), k * d);
    Eigen::MatrixXd products(targets.rows(), k);
    for (int b = 0; b < d; ++b) {
        for (int a = 0; a < k; ++a)
            products.col(a) = centred.col(a).cwiseProduct(dw.col(b));
        const Eigen::MatrixXd fitted =
            estimate_conditional(products, features, ridge).predictions;
        for (int a = 0; a < k; ++a) out.col(a * d + b) = fitted.col(a) / dt;
    }
    return out;
}

}  // namespace bdsvie
