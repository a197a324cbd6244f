#include "bdsvie/catalog.hpp"

#include <cmath>
#include <stdexcept>

namespace bdsvie {

namespace {

using YZRef = Eigen::Ref<const Eigen::MatrixXd>;

CoefficientFn zero_fn(int cols) {
    return [cols](double, double, const YZRef& y, const YZRef&, Eigen::MatrixXd& out) {
        out.setZero(y.rows(), cols);
    };
}

CoefficientFn constant_fn(int cols, double value) {
    return [cols, value](double, double, const YZRef& y, const YZRef&, Eigen::MatrixXd& out) {
        out.setConstant(y.rows(), cols, value);
    };
}

TerminalFn terminal_w() {
    return [](const BrownianEnsemble& ens) {
        return Eigen::MatrixXd(ens.w_at(ens.grid().n_steps));
    };
}

CatalogEntry martingale() {
    CatalogEntry e;
    e.name = "martingale";
    e.spec.name = e.name;
    e.spec.T = 1.0;
    e.spec.lip_c = 0.0;
    e.spec.alpha = 0.5;
    e.spec.f = zero_fn(1);
    e.spec.g = zero_fn(1);
    e.spec.xi = terminal_w();
    e.has_oracle = true;
    e.oracle_y = [](const BrownianEnsemble& ens) {
        DiagonalProcess y(ens.grid(), ens.n_paths(), 1);
        for (int i = 0; i <= ens.grid().n_steps; ++i) y.at(i) = ens.w_at(i);
        return y;
    };
    e.oracle_z = [](const BrownianEnsemble& ens) {
        TriangularField z(ens.grid(), ens.n_paths(), 1, 1);
        for (int i = 0; i < ens.grid().n_steps; ++i)
            for (int j = i; j < ens.grid().n_steps; ++j) z.at(i, j).setOnes();
        return z;
    };
    return e;
}

CatalogEntry backward_driver() {
    CatalogEntry e;
    e.name = "backward-driver";
    e.spec.name = e.name;
    e.spec.T = 1.0;
    e.spec.lip_c = 0.0;
    e.spec.alpha = 0.5;
    e.spec.f = zero_fn(1);
    e.spec.g = constant_fn(1, 1.0);
    e.spec.xi = [](const BrownianEnsemble& ens) {
        return Eigen::MatrixXd::Zero(ens.n_paths(), 1).eval();
    };
    e.has_oracle = true;
    // Y(t) = B_T - B_t is adapted: it is generated by B increments after t.
    e.oracle_y = [](const BrownianEnsemble& ens) {
        DiagonalProcess y(ens.grid(), ens.n_paths(), 1);
        const int N = ens.grid().n_steps;
        for (int i = 0; i <= N; ++i) y.at(i) = ens.b_at(N) - ens.b_at(i);
        return y;
    };
    e.oracle_z = [](const BrownianEnsemble& ens) {
        return TriangularField(ens.grid(), ens.n_paths(), 1, 1);
    };
    return e;
}

CatalogEntry linear_drift(double rho) {
    CatalogEntry e;
    e.name = "linear-drift";
    e.spec.name = e.name;
    e.spec.T = 1.0;
    e.spec.lip_c = rho * rho;
    e.spec.alpha = 0.5;
    e.spec.f = [rho](double, double, const YZRef& y, const YZRef&, Eigen::MatrixXd& out) {
        out = -rho * y;
    };
    e.spec.g = zero_fn(1);
    e.spec.xi = terminal_w();
    e.spec.f_depends_on_yz = true;
    e.has_oracle = true;
    const double T = e.spec.T;
    e.oracle_y = [rho, T](const BrownianEnsemble& ens) {
        DiagonalProcess y(ens.grid(), ens.n_paths(), 1);
        for (int i = 0; i <= ens.grid().n_steps; ++i)
            y.at(i) = std::exp(-rho * (T - ens.grid().at(i))) * ens.w_at(i);
        return y;
    };
    e.oracle_z = [rho, T](const BrownianEnsemble& ens) {
        TriangularField z(ens.grid(), ens.n_paths(), 1, 1);
        for (int i = 0; i < ens.grid().n_steps; ++i)
            for (int j = i; j < ens.grid().n_steps; ++j)
                z.at(i, j).setConstant(std::exp(-rho * (T - ens.grid().at(j))));
        return z;
    };
    return e;
}

// f(t,s) = phi(t)*psi(s) with phi(t) = t, psi = 1.
CatalogEntry kernel() {
    CatalogEntry e;
    e.name = "kernel";
    e.spec.name = e.name;
    e.spec.T = 1.0;
    e.spec.lip_c = 0.0;
    e.spec.alpha = 0.5;
    e.spec.f = [](double t, double, const YZRef& y, const YZRef&, Eigen::MatrixXd& out) {
        out.setConstant(y.rows(), 1, t);
    };
    e.spec.g = zero_fn(1);
    e.spec.xi = terminal_w();
    e.has_oracle = true;
    const double T = e.spec.T;
    e.oracle_y = [T](const BrownianEnsemble& ens) {
        DiagonalProcess y(ens.grid(), ens.n_paths(), 1);
        for (int i = 0; i <= ens.grid().n_steps; ++i) {
            const double t = ens.grid().at(i);
            y.at(i) = ens.w_at(i).array() + t * (T - t);
        }
        return y;
    };
    e.oracle_z = [](const BrownianEnsemble& ens) {
        TriangularField z(ens.grid(), ens.n_paths(), 1, 1);
        for (int i = 0; i < ens.grid().n_steps; ++i)
            for (int j = i; j < ens.grid().n_steps; ++j) z.at(i, j).setOnes();
        return z;
    };
    return e;
}

CatalogEntry lipschitz_demo() {
    CatalogEntry e;
    e.name = "lipschitz-demo";
    e.spec.name = e.name;
    e.spec.T = 1.0;
    e.spec.lip_c = 0.25;
    e.spec.alpha = 0.5;
    e.spec.f = [](double, double, const YZRef& y, const YZRef& z, Eigen::MatrixXd& out) {
        out = 0.5 * (y.col(0).array() + z.col(0).array()).sin().matrix();
    };
    e.spec.g = [](double, double, const YZRef& y, const YZRef& z, Eigen::MatrixXd& out) {
        out = (0.5 * y.col(0).array().cos() + 0.5 * z.col(0).array()).matrix();
    };
    e.spec.xi = [](const BrownianEnsemble& ens) {
        return ens.w_at(ens.grid().n_steps).array().sin().matrix().eval();
    };
    e.spec.f_depends_on_yz = true;
    e.spec.g_depends_on_yz = true;
    e.has_oracle = false;
    return e;
}

}  // namespace

CatalogEntry catalog_problem(const std::string& name) {
    if (name == "martingale") return martingale();
    if (name == "backward-driver") return backward_driver();
    if (name == "linear-drift") return linear_drift(1.0);
    if (name == "kernel") return kernel();
    if (name == "lipschitz-demo") return lipschitz_demo();
    throw std::invalid_argument("unknown catalog problem '" + name + "'");
}

std::vector<std::string> catalog_names() {
    return {"martingale", "backward-driver", "linear-drift", "kernel", "lipschitz-demo"};
}

}  // namespace bdsvie
