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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wigmagic/channels.hpp"
#include "wigmagic/conic_solver.hpp"
#include "wigmagic/wigner.hpp"

namespace wigmagic {

/// Largest number of decision variables the dense solver accepts.
inline constexpr Eigen::Index kMaxSdpVariables = 3000;

/// A threshold lower bound must exceed eps by this much to declare infeasibility.
inline constexpr double kInfeasibilityMargin = 1e-7;

namespace detail {

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix,
/// flattened column-major.
inline Eigen::VectorXd embed_hermitian(const Eigen::MatrixXcd &H) {
    const Eigen::Index n = H.rows();
    Eigen::MatrixXd E(2 * n, 2 * n);
    E.topLeftCorner(n, n) = H.real();
    E.bottomRightCorner(n, n) = H.real();
    E.topRightCorner(n, n) = -H.imag();
    E.bottomLeftCorner(n, n) = H.imag();
    return Eigen::Map<const Eigen::VectorXd>(E.data(), E.size());
}

/// Inverse of embed_hermitian.
inline Eigen::MatrixXcd unembed_hermitian(const double *data, Eigen::Index n) {
    Eigen::Map<const Eigen::MatrixXd> E(data, 2 * n, 2 * n);
    Eigen::MatrixXd re = 0.5 * (E.topLeftCorner(n, n) + E.bottomRightCorner(n, n));
    Eigen::MatrixXd im = 0.5 * (E.bottomLeftCorner(n, n) - E.topRightCorner(n, n));
    Eigen::MatrixXcd out(n, n);
    out.real() = re;
    out.imag() = im;
    return out;
}

/// Embedded (A_u^T (x) A_v) / D_A for every stochastic-matrix entry, in
/// column-major order of W (v fastest).
inline std::vector<Eigen::VectorXd> embedded_choi_basis(const DimSpec &input, const DimSpec &output) {
    const auto &in_ops = point_operators(input);
    const auto &out_ops = point_operators(output);
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(in_ops.size() * out_ops.size());
    const double DA = input.total();
    for (const auto &Au : in_ops) {
        Eigen::MatrixXcd AuT = Au.transpose();
        for (const auto &Av : out_ops) {
            basis.push_back(embed_hermitian(Eigen::kroneckerProduct(AuT, Av).eval() / DA));
        }
    }
    return basis;
}

inline void require_sdp_size(Eigen::Index n) {
    if (n > kMaxSdpVariables) {
        throw std::invalid_argument("SDP has " + std::to_string(n) + " variables; the dense solver accepts at most " +
                                    std::to_string(kMaxSdpVariables));
    }
}

}  // namespace detail

/// The two-term decomposition program for converting rho into sigma within
/// operator-norm error eps. Decision vector x = [vec W1, vec W2, c], with
/// W1, W2 the stochastic Wigner matrices of J1, J2 stored column-major.
///
/// Constraints: W1, W2, W1 - W2 >= 0 entrywise; column sums of W1 equal c
/// and of W2 equal c - 1; J1, J2 PSD; the transformation constraint is the
/// equality (W1 - W2) p = q when eps = 0 and the two-sided operator
/// inequality otherwise. The objective is 2c - 1.
struct SdpModel {
    Operator rho;
    Operator sigma;
    double eps = 0;
    Eigen::VectorXd p;
    Eigen::VectorXd q;
    Eigen::Index entries = 0;
    conic::ConeProgram program;
    /// Constant added to c'x to obtain 2c - 1.
    double objective_offset = -1.0;

    const DimSpec &input() const { return rho.dims; }
    const DimSpec &output() const { return sigma.dims; }
    Eigen::Index num_variables() const { return 2 * entries + 1; }

    Eigen::VectorXd pack(const StochasticWignerMatrix &W1, const StochasticWignerMatrix &W2, double c) const {
        Eigen::VectorXd x(num_variables());
        x.head(entries) = Eigen::Map<const Eigen::VectorXd>(W1.values.data(), entries);
        x.segment(entries, entries) = Eigen::Map<const Eigen::VectorXd>(W2.values.data(), entries);
        x(2 * entries) = c;
        return x;
    }

    /// Packs a candidate certificate given by Choi matrices.
    Eigen::VectorXd pack(const ChoiMatrix &J1, const ChoiMatrix &J2, double c) const {
        return pack(wigner_of_map(J1), wigner_of_map(J2), c);
    }

    StochasticWignerMatrix stochastic(const Eigen::VectorXd &x, int which) const {
        Eigen::Index rows = output().num_points();
        Eigen::Index cols = input().num_points();
        Eigen::MatrixXd W = Eigen::Map<const Eigen::MatrixXd>(x.data() + (which == 1 ? 0 : entries), rows, cols);
        return StochasticWignerMatrix{W, input(), output()};
    }

    std::pair<ChoiMatrix, ChoiMatrix> choi_pair(const Eigen::VectorXd &x) const {
        return {map_from_wigner(stochastic(x, 1)), map_from_wigner(stochastic(x, 2))};
    }

    double objective(const Eigen::VectorXd &x) const { return program.c.dot(x) + objective_offset; }

    /// True when x satisfies every constraint to within tol.
    bool admits(const Eigen::VectorXd &x, double tol = 1e-8) const {
        if (x.size() != num_variables()) return false;
        const auto &P = program;
        if (P.A.rows() > 0 && (P.A * x - P.b).cwiseAbs().maxCoeff() > tol) return false;
        Eigen::VectorXd s = P.h - P.G * x;
        if (P.dims.linear > 0 && s.head(P.dims.linear).minCoeff() < -tol) return false;
        Eigen::Index off = P.dims.linear;
        for (int m : P.dims.psd) {
            Eigen::Map<const Eigen::MatrixXd> S(s.data() + off, m, m);
            Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
            if (eig.eigenvalues()(0) < -tol) return false;
            off += static_cast<Eigen::Index>(m) * m;
        }
        return true;
    }
};

inline SdpModel build_sdp(const Operator &rho, const Operator &sigma, double eps) {
    require_state(rho, "source state");
    require_state(sigma, "target state");
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("eps must be a finite number >= 0");
    }
    SdpModel model;
    model.rho = rho;
    model.sigma = sigma;
    model.eps = eps;
    model.p = wigner_of_operator(rho).values;
    model.q = wigner_of_operator(sigma).values;

    const DimSpec &in = rho.dims;
    const DimSpec &out = sigma.dims;
    const Eigen::Index nin = in.num_points();
    const Eigen::Index nout = out.num_points();
    const Eigen::Index N = nin * nout;
    model.entries = N;
    const Eigen::Index n = 2 * N + 1;
    detail::require_sdp_size(n);
    const Eigen::Index c_index = 2 * N;

    const int DA = in.total();
    const int DB = out.total();
    const int jdim = 2 * DA * DB;
    const int odim = 2 * DB;

    conic::ConeDims dims;
    dims.linear = static_cast<int>(3 * N);
    dims.psd = {jdim, jdim};
    if (eps > 0) {
        dims.psd.push_back(odim);
        dims.psd.push_back(odim);
    }
    auto &P = model.program;
    P.dims = dims;
    P.c = Eigen::VectorXd::Zero(n);
    P.c(c_index) = 2.0;
    P.G = Eigen::MatrixXd::Zero(dims.size(), n);
    P.h = Eigen::VectorXd::Zero(dims.size());

    for (Eigen::Index k = 0; k < N; k++) {
        P.G(k, k) = -1.0;
        P.G(N + k, N + k) = -1.0;
        P.G(2 * N + k, k) = -1.0;
        P.G(2 * N + k, N + k) = 1.0;
    }
    const Eigen::Index jsize = static_cast<Eigen::Index>(jdim) * jdim;
    const Eigen::Index j1_off = 3 * N;
    const Eigen::Index j2_off = j1_off + jsize;
    auto basis = detail::embedded_choi_basis(in, out);
    for (Eigen::Index k = 0; k < N; k++) {
        P.G.block(j1_off, k, jsize, 1) = -basis[static_cast<std::size_t>(k)];
        P.G.block(j2_off, N + k, jsize, 1) = -basis[static_cast<std::size_t>(k)];
    }

    // Column sums: W1 = c, W2 = c - 1.
    Eigen::Index neq = 2 * nin + (eps > 0 ? 0 : nout);
    P.A = Eigen::MatrixXd::Zero(neq, n);
    P.b = Eigen::VectorXd::Zero(neq);
    for (Eigen::Index u = 0; u < nin; u++) {
        for (Eigen::Index v = 0; v < nout; v++) {
            P.A(u, u * nout + v) = 1.0;
            P.A(nin + u, N + u * nout + v) = 1.0;
        }
        P.A(u, c_index) = -1.0;
        P.A(nin + u, c_index) = -1.0;
        P.b(nin + u) = -1.0;
    }

    const auto &out_ops = point_operators(out);
    if (eps == 0) {
        for (Eigen::Index v = 0; v < nout; v++) {
            Eigen::Index row = 2 * nin + v;
            for (Eigen::Index u = 0; u < nin; u++) {
                P.A(row, u * nout + v) = model.p(u);
                P.A(row, N + u * nout + v) = -model.p(u);
            }
            P.b(row) = model.q(v);
        }
    } else {
        const Eigen::Index osize = static_cast<Eigen::Index>(odim) * odim;
        const Eigen::Index upper_off = j2_off + jsize;
        const Eigen::Index lower_off = upper_off + osize;
        std::vector<Eigen::VectorXd> out_embedded;
        for (const auto &Av : out_ops) out_embedded.push_back(detail::embed_hermitian(Av));
        Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(DB, DB);
        // eps I + sigma - N(rho) >= 0 and N(rho) - sigma + eps I >= 0.
        P.h.segment(upper_off, osize) = detail::embed_hermitian(eps * I + sigma.matrix);
        P.h.segment(lower_off, osize) = detail::embed_hermitian(eps * I - sigma.matrix);
        for (Eigen::Index u = 0; u < nin; u++) {
            for (Eigen::Index v = 0; v < nout; v++) {
                Eigen::VectorXd col = model.p(u) * out_embedded[static_cast<std::size_t>(v)];
                Eigen::Index k = u * nout + v;
                P.G.block(upper_off, k, osize, 1) = col;
                P.G.block(upper_off, N + k, osize, 1) = -col;
                P.G.block(lower_off, k, osize, 1) = -col;
                P.G.block(lower_off, N + k, osize, 1) = col;
            }
        }
    }
    return model;
}

enum class SdpStatus { optimal, infeasible, solver_error };

inline const char *to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal:
            return "optimal";
        case SdpStatus::infeasible:
            return "infeasible";
        default:
            return "solver_error";
    }
}

struct SdpOutcome {
    SdpStatus status = SdpStatus::solver_error;
    double c_star = 0;
    /// log2(2 c_star - 1).
    double nu = 0;
    std::pair<ChoiMatrix, ChoiMatrix> choi_pair;
    double duality_gap = 0;
    int iterations = 0;
    /// Certified lower bound on the smallest achievable error.
    double threshold_bound = 0;
    std::string message;

    /// 2^nu = 2 c_star - 1.
    double gamma() const { return 2.0 * c_star - 1.0; }
};

/// Smallest operator-norm error achievable by any positive-Wigner-preserving
/// quasi-operation, min_W || N_W(rho) - sigma ||_op over column-stochastic W.
struct ThresholdResult {
    conic::Status status = conic::Status::unknown;
    /// Primal value: an achievable error.
    double upper = 0;
    /// Dual value: no quasi-operation does better.
    double lower = 0;
    int iterations = 0;
};

inline conic::ConeProgram build_threshold_program(const Operator &rho, const Operator &sigma) {
    Eigen::VectorXd p = wigner_of_operator(rho).values;
    const DimSpec &in = rho.dims;
    const DimSpec &out = sigma.dims;
    const Eigen::Index nin = in.num_points();
    const Eigen::Index nout = out.num_points();
    const Eigen::Index N = nin * nout;
    const Eigen::Index n = N + 1;
    detail::require_sdp_size(n);
    const int DB = out.total();
    const int odim = 2 * DB;
    const Eigen::Index osize = static_cast<Eigen::Index>(odim) * odim;

    conic::ConeProgram P;
    P.dims.linear = static_cast<int>(N);
    P.dims.psd = {odim, odim};
    P.c = Eigen::VectorXd::Zero(n);
    P.c(N) = 1.0;
    P.G = Eigen::MatrixXd::Zero(P.dims.size(), n);
    P.h = Eigen::VectorXd::Zero(P.dims.size());
    P.G.topLeftCorner(N, N) = -Eigen::MatrixXd::Identity(N, N);
    P.A = Eigen::MatrixXd::Zero(nin, n);
    P.b = Eigen::VectorXd::Ones(nin);
    for (Eigen::Index u = 0; u < nin; u++) {
        P.A.block(u, u * nout, 1, nout).setOnes();
    }
    const Eigen::Index upper_off = N;
    const Eigen::Index lower_off = N + osize;
    const auto &out_ops = point_operators(out);
    Eigen::VectorXd eye = detail::embed_hermitian(Eigen::MatrixXcd::Identity(DB, DB));
    P.h.segment(upper_off, osize) = detail::embed_hermitian(sigma.matrix);
    P.h.segment(lower_off, osize) = -detail::embed_hermitian(sigma.matrix);
    P.G.block(upper_off, N, osize, 1) = -eye;
    P.G.block(lower_off, N, osize, 1) = -eye;
    for (Eigen::Index u = 0; u < nin; u++) {
        for (Eigen::Index v = 0; v < nout; v++) {
            Eigen::VectorXd col = p(u) * detail::embed_hermitian(out_ops[static_cast<std::size_t>(v)]);
            P.G.block(upper_off, u * nout + v, osize, 1) = col;
            P.G.block(lower_off, u * nout + v, osize, 1) = -col;
        }
    }
    return P;
}

inline ThresholdResult feasibility_threshold(const Operator &rho, const Operator &sigma,
                                             const conic::Options &opt = {}) {
    require_state(rho, "source state");
    require_state(sigma, "target state");
    auto sol = conic::solve(build_threshold_program(rho, sigma), opt);
    ThresholdResult out;
    out.status = sol.status;
    out.upper = sol.primal_objective;
    out.lower = sol.dual_objective;
    out.iterations = sol.iterations;
    return out;
}

/// Minimum of 2c - 1 over decompositions N = N1 - N2 into scaled
/// positive-Wigner-preserving channels, reported as nu = log2(2c - 1).
///
/// Feasibility is settled first by the dual bound of the threshold program;
/// the decomposition program is only solved when that bound does not
/// exclude eps.
inline SdpOutcome physical_implementability(const Operator &rho, const Operator &sigma, double eps,
                                            const conic::Options &opt = {}) {
    SdpModel model = build_sdp(rho, sigma, eps);
    SdpOutcome out;
    ThresholdResult th = feasibility_threshold(rho, sigma, opt);
    out.threshold_bound = th.lower;
    out.iterations = th.iterations;
    if (th.status != conic::Status::optimal) {
        out.status = SdpStatus::solver_error;
        out.message = std::string("threshold program: ") + conic::to_string(th.status);
        return out;
    }
    if (th.lower > eps + kInfeasibilityMargin) {
        out.status = SdpStatus::infeasible;
        out.message = "no quasi-operation reaches error " + std::to_string(eps) + "; certified lower bound " +
                      std::to_string(th.lower);
        return out;
    }

    auto sol = conic::solve(model.program, opt);
    out.iterations += sol.iterations;
    switch (sol.status) {
        case conic::Status::optimal: {
            out.status = SdpStatus::optimal;
            // W2 >= 0 with column sums c - 1 forces c >= 1; smaller values are solver residue.
            out.c_star = std::max(1.0, sol.x(2 * model.entries));
            out.nu = std::log2(out.gamma());
            out.choi_pair = model.choi_pair(sol.x);
            out.duality_gap = std::max(sol.gap, std::abs(sol.primal_objective - sol.dual_objective));
            break;
        }
        case conic::Status::primal_infeasible:
            out.status = SdpStatus::infeasible;
            out.message = "decomposition program is infeasible";
            break;
        default:
            out.status = SdpStatus::solver_error;
            out.message = std::string("decomposition program: ") + conic::to_string(sol.status) +
                          (sol.message.empty() ? "" : " (" + sol.message + ")");
            break;
    }
    return out;
}

/// Bisection on eps for the boundary between infeasible and feasible, to
/// within tol. Returns lo when eps = lo is already feasible.
inline double bisect_feasibility_threshold(const Operator &rho, const Operator &sigma, double lo, double hi,
                                           double tol = 1e-4) {
    auto feasible = [&](double eps) {
        auto r = physical_implementability(rho, sigma, eps);
        if (r.status == SdpStatus::solver_error) {
            throw std::runtime_error("solver error during threshold bisection at eps = " + std::to_string(eps) +
                                     ": " + r.message);
        }
        return r.status == SdpStatus::optimal;
    };
    if (feasible(lo)) return lo;
    while (!feasible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 64.0) throw std::runtime_error("no feasible eps found during threshold bisection");
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

/// 2 (2^nu)^2 ln(2 / delta) / eps^2 samples for additive error eps with
/// failure probability delta.
inline double sampling_bound(double nu, double eps, double delta) {
    if (!std::isfinite(nu) || nu < 0) {
        throw std::domain_error("nu must be finite and >= 0");
    }
    if (!(eps > 0) || !std::isfinite(eps)) {
        throw std::domain_error("eps must be > 0");
    }
    if (!(delta > 0 && delta < 1)) {
        throw std::domain_error("delta must lie in (0, 1)");
    }
    double gamma = std::exp2(nu);
    return 2.0 * gamma * gamma * std::log(2.0 / delta) / (eps * eps);
}

inline long long sampling_cost(double nu, double eps, double delta) {
    double bound = sampling_bound(nu, eps, delta);
    if (bound > 9e18) {
        throw std::domain_error("sample count overflows");
    }
    return static_cast<long long>(std::ceil(bound * (1.0 - 1e-12)));
}

}  // namespace wigmagic
