// Copyright 2026 The wigmagic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wigmagic/wigner.hpp"

namespace wigmagic {

class SolverError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Phase-one simplex: decides whether {x >= 0 : A x = b} is nonempty.
/// Dense tableau with Bland's rule, so it terminates on degenerate problems.
inline bool linear_feasible(Eigen::MatrixXd A, Eigen::VectorXd b, double tol = 1e-9) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    for (Eigen::Index i = 0; i < m; i++) {
        if (b(i) < 0) {
            A.row(i) *= -1.0;
            b(i) *= -1.0;
        }
    }
    // Columns: n structural variables, m artificials, then the rhs.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    T.topLeftCorner(m, n) = A;
    T.block(0, n, m, m).setIdentity();
    T.col(n + m).head(m) = b;
    // Objective row holds reduced costs of min sum(artificials).
    for (Eigen::Index i = 0; i < m; i++) {
        T.row(m) -= T.row(i);
    }
    for (Eigen::Index j = n; j < n + m; j++) T(m, j) = 0;
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; i++) basis[static_cast<std::size_t>(i)] = n + i;

    const double pivot_tol = 1e-11;
    const int max_pivots = 50 * static_cast<int>(n + m) + 1000;
    for (int it = 0; it < max_pivots; it++) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; j++) {
            if (T(m, j) < -pivot_tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) {
            // Optimal: the artificial sum is minus the objective rhs.
            return -T(m, n + m) <= tol * std::max(1.0, b.cwiseAbs().sum());
        }
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; i++) {
            if (T(i, enter) > pivot_tol) {
                double ratio = T(i, n + m) / T(i, enter);
                if (ratio < best - 1e-14 ||
                    (ratio <= best + 1e-14 && leave >= 0 &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            throw SolverError("phase-one simplex is unbounded, which cannot happen for a feasibility problem");
        }
        T.row(leave) /= T(leave, enter);
        for (Eigen::Index i = 0; i <= m; i++) {
            if (i != leave && T(i, enter) != 0.0) {
                T.row(i) -= T(i, enter) * T.row(leave);
            }
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }
    throw SolverError("phase-one simplex hit its pivot limit");
}

/// Independent feasibility check for W p = q with W column stochastic: a
/// linear program over vec(W) >= 0 with rows [p_1 I ... p_m I] and one
/// 1^T row per column.
inline bool lp_feasibility_oracle(const Eigen::VectorXd &p, const Eigen::VectorXd &q) {
    if (std::abs(p.sum() - 1.0) > 1e-9 || std::abs(q.sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("quasi-probability vectors must sum to 1");
    }
    const Eigen::Index d = q.size();
    const Eigen::Index m = p.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + m, d * m);
    Eigen::VectorXd b(d + m);
    for (Eigen::Index j = 0; j < m; j++) {
        A.block(0, j * d, d, d) = p(j) * Eigen::MatrixXd::Identity(d, d);
        A.block(d + j, j * d, 1, d).setOnes();
    }
    b.head(d) = q;
    b.tail(m).setOnes();
    return linear_feasible(std::move(A), std::move(b));
}

inline bool lp_feasibility_oracle(const WignerVector &p, const WignerVector &q) {
    return lp_feasibility_oracle(p.values, q.values);
}

}  // namespace wigmagic
