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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "wigmagic/phase_space.hpp"

namespace wigmagic {

/// Imaginary parts up to this size are rounding noise and get dropped.
inline constexpr double kImaginaryTolerance = 1e-10;

/// Tolerance used when validating density operators.
inline constexpr double kStateTolerance = 1e-8;

/// Raised when a representation that must be real comes out complex.
class NotHermitianError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Dense operator on a (composite) odd-dimensional Hilbert space.
struct Operator {
    Eigen::MatrixXcd matrix;
    DimSpec dims;

    Operator() = default;
    Operator(Eigen::MatrixXcd m, DimSpec spec) : matrix(std::move(m)), dims(std::move(spec)) {
        if (matrix.rows() != dims.total() || matrix.cols() != dims.total()) {
            throw std::invalid_argument("operator shape " + std::to_string(matrix.rows()) + "x" +
                                        std::to_string(matrix.cols()) + " does not match dims " + dims.str());
        }
    }

    Operator tensor(const Operator &other) const {
        return Operator(Eigen::kroneckerProduct(matrix, other.matrix).eval(), dims.tensor(other.dims));
    }
};

/// Quasi-probability vector indexed by flattened phase points.
struct WignerVector {
    Eigen::VectorXd values;
    DimSpec dims;

    double sum() const { return values.sum(); }
    double l1_norm() const { return values.cwiseAbs().sum(); }
};

/// Real matrix W_N with entry (v, u) = W_N(v | u); columns index input points.
struct StochasticWignerMatrix {
    Eigen::MatrixXd values;
    DimSpec input;
    DimSpec output;
};

/// Choi matrix J_N = sum_ij |i><j| (x) N(|i><j|), input factor first.
struct ChoiMatrix {
    Eigen::MatrixXcd matrix;
    DimSpec input;
    DimSpec output;

    ChoiMatrix() = default;
    ChoiMatrix(Eigen::MatrixXcd m, DimSpec in, DimSpec out)
        : matrix(std::move(m)), input(std::move(in)), output(std::move(out)) {
        Eigen::Index n = static_cast<Eigen::Index>(input.total()) * output.total();
        if (matrix.rows() != n || matrix.cols() != n) {
            throw std::invalid_argument("Choi matrix shape does not match dims " + input.str() + " -> " +
                                        output.str());
        }
    }
};

inline bool is_hermitian(const Eigen::MatrixXcd &X, double tol) {
    return X.rows() == X.cols() && (X - X.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Throws unless `rho` is Hermitian, unit-trace and positive semidefinite.
inline void require_state(const Operator &rho, const char *what = "state") {
    const auto &M = rho.matrix;
    if (!is_hermitian(M, kStateTolerance)) {
        throw std::invalid_argument(std::string(what) + " is not Hermitian");
    }
    if (std::abs(M.trace() - 1.0) > kStateTolerance) {
        throw std::invalid_argument(std::string(what) + " does not have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kStateTolerance) {
        throw std::invalid_argument(std::string(what) + " is not positive semidefinite");
    }
}

/// tr[A_u X] / D for every phase point, without any realness check.
inline Eigen::VectorXcd complex_wigner_of_operator(const Eigen::MatrixXcd &X, const DimSpec &spec) {
    int D = spec.total();
    if (X.rows() != D || X.cols() != D) {
        throw std::invalid_argument("operator dimension does not match dims " + spec.str());
    }
    const auto &ops = point_operators(spec);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(ops.size()));
    for (std::size_t i = 0; i < ops.size(); i++) {
        // tr[A X] = sum_jk A_jk X_kj
        out(static_cast<Eigen::Index>(i)) = ops[i].cwiseProduct(X.transpose()).sum() / static_cast<double>(D);
    }
    return out;
}

inline WignerVector wigner_of_operator(const Eigen::MatrixXcd &X, const DimSpec &spec) {
    Eigen::VectorXcd w = complex_wigner_of_operator(X, spec);
    if (w.size() > 0 && w.imag().cwiseAbs().maxCoeff() > kImaginaryTolerance) {
        throw NotHermitianError("complex Wigner vector: operator is not Hermitian");
    }
    return WignerVector{w.real(), spec};
}

inline WignerVector wigner_of_operator(const Operator &X) { return wigner_of_operator(X.matrix, X.dims); }

/// sum_u w(u) A_u.
inline Operator operator_from_wigner(const WignerVector &w) {
    const auto &ops = point_operators(w.dims);
    if (w.values.size() != static_cast<Eigen::Index>(ops.size())) {
        throw std::invalid_argument("Wigner vector length does not match dims " + w.dims.str());
    }
    int D = w.dims.total();
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(D, D);
    for (std::size_t i = 0; i < ops.size(); i++) {
        X += w.values(static_cast<Eigen::Index>(i)) * ops[i];
    }
    return Operator(std::move(X), w.dims);
}

/// Entry (v, u) = tr[((A_u)^T (x) A_v) J] / D_B, without any realness check.
inline Eigen::MatrixXcd complex_wigner_of_map(const ChoiMatrix &J) {
    const auto &in_ops = point_operators(J.input);
    const auto &out_ops = point_operators(J.output);
    int DA = J.input.total();
    int DB = J.output.total();
    Eigen::MatrixXcd W(static_cast<Eigen::Index>(out_ops.size()), static_cast<Eigen::Index>(in_ops.size()));
    // tr[(A^T (x) B) J] = sum_{ij} (A^T)_ji tr[B J_ij] where J_ij is the (i, j) output block.
    // Precompute tr[A_v J_ij] for every block first.
    std::vector<Eigen::MatrixXcd> block_traces(out_ops.size(), Eigen::MatrixXcd(DA, DA));
    for (int i = 0; i < DA; i++) {
        for (int j = 0; j < DA; j++) {
            auto block = J.matrix.block(i * DB, j * DB, DB, DB);
            for (std::size_t v = 0; v < out_ops.size(); v++) {
                block_traces[v](i, j) = out_ops[v].cwiseProduct(block.transpose()).sum();
            }
        }
    }
    for (std::size_t v = 0; v < out_ops.size(); v++) {
        for (std::size_t u = 0; u < in_ops.size(); u++) {
            // sum_ij (A_u^T)_ji t_ij = sum_ij (A_u)_ij t_ij
            complex_t value = in_ops[u].cwiseProduct(block_traces[v]).sum();
            W(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = value / static_cast<double>(DB);
        }
    }
    return W;
}

inline StochasticWignerMatrix wigner_of_map(const ChoiMatrix &J) {
    Eigen::MatrixXcd W = complex_wigner_of_map(J);
    if (W.size() > 0 && W.imag().cwiseAbs().maxCoeff() > kImaginaryTolerance) {
        throw NotHermitianError("complex stochastic Wigner matrix: map is not Hermitian-preserving");
    }
    return StochasticWignerMatrix{W.real(), J.input, J.output};
}

/// Base-2 logarithm of the Wigner l1-norm.
inline double mana(const Operator &rho) {
    require_state(rho);
    double norm = wigner_of_operator(rho).l1_norm();
    return std::max(0.0, std::log2(norm));
}

inline WignerVector apply_stochastic(const StochasticWignerMatrix &W, const WignerVector &w) {
    if (W.values.cols() != w.values.size() || !(W.input == w.dims)) {
        throw std::invalid_argument("stochastic matrix input (" + W.input.str() +
                                    ") does not match Wigner vector dims (" + w.dims.str() + ")");
    }
    return WignerVector{W.values * w.values, W.output};
}

}  // namespace wigmagic
