#include "ringdeco/expm.hpp"

#include <algorithm>
#include <cmath>

#include "ringdeco/error.hpp"

namespace ringdeco {

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw ValidationError("expm needs a square matrix");
    if (!a.allFinite()) throw ValidationError("expm: matrix has non-finite entries");
    const Eigen::Index n = a.rows();
    if (n == 0) return a;

    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    const Eigen::MatrixXcd s = a / std::ldexp(1.0, squarings);

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd s2 = s * s;
    const Eigen::MatrixXcd s4 = s2 * s2;
    const Eigen::MatrixXcd s6 = s4 * s2;
    const Eigen::MatrixXcd u_inner = s6 * (b[13] * s6 + b[11] * s4 + b[9] * s2);
    const Eigen::MatrixXcd u = s * (u_inner + b[7] * s6 + b[5] * s4 + b[3] * s2 + b[1] * id);
    const Eigen::MatrixXcd v_inner = s6 * (b[12] * s6 + b[10] * s4 + b[8] * s2);
    const Eigen::MatrixXcd v = v_inner + b[6] * s6 + b[4] * s4 + b[2] * s2 + b[0] * id;

    Eigen::MatrixXcd r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

}  // namespace ringdeco
