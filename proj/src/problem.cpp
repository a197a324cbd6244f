#include "bdsvie/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace bdsvie {

void ProblemSpec::validate() const {
    if (k < 1 || d < 1 || l < 1)
        throw std::invalid_argument("ProblemSpec: dimensions must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("ProblemSpec: T must be positive");
    if (!(lip_c >= 0.0)) throw std::invalid_argument("ProblemSpec: C must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie strictly inside (0,1)");
    if (!f || !g || !xi) throw std::invalid_argument("ProblemSpec: f, g, xi must all be set");

    // Spot-check f(.,.,0,0) and g(.,.,0,0) on the triangle.
    const Eigen::MatrixXd y0 = Eigen::MatrixXd::Zero(1, k);
    const Eigen::MatrixXd z0 = Eigen::MatrixXd::Zero(1, k * d);
    Eigen::MatrixXd fv(1, k), gv(1, k * l);
    for (double t : {0.0, 0.5 * T}) {
        for (double s : {t, 0.5 * (t + T), T}) {
            f(t, s, y0, z0, fv);
            g(t, s, y0, z0, gv);
            if (!fv.allFinite() || !gv.allFinite())
                throw std::invalid_argument(
                    "ProblemSpec: f or g is non-finite at (t, s, 0, 0)");
        }
    }
}

}  // namespace bdsvie
