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

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "wigmagic/wigner.hpp"

namespace wigmagic {

/// Tolerance for the HP / TP / CP / PWP predicates.
inline constexpr double kMapTolerance = 1e-9;

/// Membership flags of a linear map in the classes used throughout the library.
struct MapClass {
    bool hermitian_preserving = false;
    bool trace_preserving = false;
    bool completely_positive = false;
    bool positive_wigner_preserving = false;

    /// Hermitian-preserving, trace-preserving and positive-Wigner-preserving.
    bool pwpq() const { return hermitian_preserving && trace_preserving && positive_wigner_preserving; }
    bool cptp_pwp() const { return pwpq() && completely_positive; }
};

/// tr_B J: the D_A x D_A operator that equals I exactly for trace-preserving maps.
inline Eigen::MatrixXcd trace_out_output(const ChoiMatrix &J) {
    int DA = J.input.total();
    int DB = J.output.total();
    Eigen::MatrixXcd out(DA, DA);
    for (int i = 0; i < DA; i++) {
        for (int j = 0; j < DA; j++) {
            out(i, j) = J.matrix.block(i * DB, j * DB, DB, DB).trace();
        }
    }
    return out;
}

inline MapClass classify(const ChoiMatrix &J) {
    MapClass out;
    const auto &M = J.matrix;
    out.hermitian_preserving = is_hermitian(M, kMapTolerance);
    int DA = J.input.total();
    out.trace_preserving =
        (trace_out_output(J) - Eigen::MatrixXcd::Identity(DA, DA)).cwiseAbs().maxCoeff() <= kMapTolerance;
    if (!out.hermitian_preserving) {
        // Non-HP maps have complex Wigner matrices and non-Hermitian Choi
        // matrices, so neither positivity notion applies.
        return out;
    }
    Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H, Eigen::EigenvaluesOnly);
    out.completely_positive = eig.eigenvalues().minCoeff() >= -kMapTolerance;
    Eigen::MatrixXd W = complex_wigner_of_map(J).real();
    out.positive_wigner_preserving = W.minCoeff() >= -kMapTolerance;
    return out;
}

/// Inverts the stochastic Wigner representation using tr[A_u A_v] = D delta_uv:
///   J = (1 / D_A) sum_{u,v} W(v|u) (A_u)^T (x) A_v.
inline ChoiMatrix map_from_wigner(const StochasticWignerMatrix &W) {
    const auto &in_ops = point_operators(W.input);
    const auto &out_ops = point_operators(W.output);
    if (W.values.rows() != static_cast<Eigen::Index>(out_ops.size()) ||
        W.values.cols() != static_cast<Eigen::Index>(in_ops.size())) {
        throw std::invalid_argument("stochastic Wigner matrix shape does not match " + W.input.str() + " -> " +
                                    W.output.str());
    }
    int DA = W.input.total();
    int DB = W.output.total();
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(DA * DB, DA * DB);
    for (std::size_t u = 0; u < in_ops.size(); u++) {
        // sum_v W(v|u) A_v, then one Kronecker product per input point.
        Eigen::MatrixXcd image = Eigen::MatrixXcd::Zero(DB, DB);
        for (std::size_t v = 0; v < out_ops.size(); v++) {
            image += W.values(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) * out_ops[v];
        }
        J += Eigen::kroneckerProduct(in_ops[u].transpose(), image);
    }
    J /= static_cast<double>(DA);
    return ChoiMatrix(std::move(J), W.input, W.output);
}

/// N(rho) = tr_A[(rho^T (x) I) J].
inline Operator apply_choi(const ChoiMatrix &J, const Operator &rho) {
    if (!(rho.dims == J.input)) {
        throw std::invalid_argument("state dims " + rho.dims.str() + " do not match map input " + J.input.str());
    }
    int DA = J.input.total();
    int DB = J.output.total();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(DB, DB);
    for (int i = 0; i < DA; i++) {
        for (int j = 0; j < DA; j++) {
            out += rho.matrix(i, j) * J.matrix.block(i * DB, j * DB, DB, DB);
        }
    }
    return Operator(std::move(out), J.output);
}

/// Choi matrix of an arbitrary linear map given as a callable.
inline ChoiMatrix choi_of(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd &)> &map, const DimSpec &input,
                          const DimSpec &output) {
    int DA = input.total();
    int DB = output.total();
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(DA * DB, DA * DB);
    for (int i = 0; i < DA; i++) {
        for (int j = 0; j < DA; j++) {
            Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(DA, DA);
            E(i, j) = 1.0;
            Eigen::MatrixXcd image = map(E);
            if (image.rows() != DB || image.cols() != DB) {
                throw std::invalid_argument("map output has the wrong dimension");
            }
            J.block(i * DB, j * DB, DB, DB) = image;
        }
    }
    return ChoiMatrix(std::move(J), input, output);
}

inline ChoiMatrix identity_channel(const DimSpec &dims) {
    return choi_of([](const Eigen::MatrixXcd &X) { return X; }, dims, dims);
}

/// X -> U X U^dagger.
inline ChoiMatrix unitary_channel(const Eigen::MatrixXcd &U, const DimSpec &dims) {
    return choi_of([&U](const Eigen::MatrixXcd &X) -> Eigen::MatrixXcd { return U * X * U.adjoint(); }, dims, dims);
}

/// X -> tr[X] sigma.
inline ChoiMatrix replacement_channel(const DimSpec &input, const Operator &sigma) {
    return choi_of([&sigma](const Eigen::MatrixXcd &X) -> Eigen::MatrixXcd { return X.trace() * sigma.matrix; },
                   input, sigma.dims);
}

/// X -> tr[X] I / D_B.
inline ChoiMatrix completely_depolarizing_channel(const DimSpec &input, const DimSpec &output) {
    int DB = output.total();
    Operator mixed(Eigen::MatrixXcd::Identity(DB, DB) / static_cast<double>(DB), output);
    return replacement_channel(input, mixed);
}

}  // namespace wigmagic
