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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>
#include <cstdio>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace wigmagic::conic {

/// Cone layout of the slack vector: a nonnegative orthant of size `linear`
/// followed by one PSD block per entry of `psd`, each stored as a full
/// column-major m x m matrix.
struct ConeDims {
    int linear = 0;
    std::vector<int> psd;

    Eigen::Index size() const {
        Eigen::Index n = linear;
        for (int m : psd) n += static_cast<Eigen::Index>(m) * m;
        return n;
    }

    /// Number of eigenvalue-like coordinates: l + sum m.
    Eigen::Index degree() const {
        Eigen::Index n = linear;
        for (int m : psd) n += m;
        return n;
    }
};

/// minimize c'x subject to G x + s = h, A x = b, s in the cone.
struct ConeProgram {
    Eigen::VectorXd c;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    ConeDims dims;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

enum class Status { optimal, primal_infeasible, dual_infeasible, unknown };

inline const char *to_string(Status s) {
    switch (s) {
        case Status::optimal:
            return "optimal";
        case Status::primal_infeasible:
            return "primal_infeasible";
        case Status::dual_infeasible:
            return "dual_infeasible";
        default:
            return "unknown";
    }
}

struct Options {
    int max_iterations = 100;
    double abstol = 1e-8;
    double reltol = 1e-8;
    double feastol = 1e-8;
    /// If the iteration breaks down, the best iterate is still reported as
    /// optimal when its residuals and gap are below this.
    double fallback_tol = 1e-7;
    int refinement = 1;
    double step = 0.99;
    int expon = 3;
    bool verbose = false;
};

struct Solution {
    Status status = Status::unknown;
    Eigen::VectorXd x, y, s, z;
    double primal_objective = 0;
    double dual_objective = 0;
    double gap = 0;
    std::optional<double> relative_gap;
    double primal_residual = 0;
    double dual_residual = 0;
    int iterations = 0;
    std::string message;
};

/// Thrown when the reduced KKT system cannot be factored.
class KktError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

namespace detail {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Nesterov-Todd scaling: W z = W^{-T} s = lambda.
struct Scaling {
    VectorXd d, di;
    std::vector<MatrixXd> r, rti;
};

inline Scaling identity_scaling(const ConeDims &dims) {
    Scaling W;
    W.d = VectorXd::Ones(dims.linear);
    W.di = VectorXd::Ones(dims.linear);
    for (int m : dims.psd) {
        W.r.push_back(MatrixXd::Identity(m, m));
        W.rti.push_back(MatrixXd::Identity(m, m));
    }
    return W;
}

// W: r' X r; W': r X r'; W^{-1}: rti X rti'; W^{-T}: rti' X rti.
inline void scale(double *x, const Scaling &W, const ConeDims &dims, bool trans, bool inverse) {
    Eigen::Map<VectorXd> lin(x, dims.linear);
    lin.array() *= inverse ? W.di.array() : W.d.array();
    Index off = dims.linear;
    for (std::size_t k = 0; k < dims.psd.size(); k++) {
        int m = dims.psd[k];
        Eigen::Map<MatrixXd> X(x + off, m, m);
        const MatrixXd &R = inverse ? W.rti[k] : W.r[k];
        bool left_transposed = inverse ? trans : !trans;
        MatrixXd Y = left_transposed ? MatrixXd(R.transpose() * X * R) : MatrixXd(R * X * R.transpose());
        X = 0.5 * (Y + Y.transpose());
        off += static_cast<Index>(m) * m;
    }
}

inline void scale(VectorXd &x, const Scaling &W, const ConeDims &dims, bool trans, bool inverse) {
    scale(x.data(), W, dims, trans, inverse);
}

inline void add_identity(VectorXd &x, const ConeDims &dims, double a) {
    x.head(dims.linear).array() += a;
    Index off = dims.linear;
    for (int m : dims.psd) {
        for (int i = 0; i < m; i++) x(off + static_cast<Index>(i) * m + i) += a;
        off += static_cast<Index>(m) * m;
    }
}

/// x := lambda o x for diagonal lambda.
inline void sprod_diag(VectorXd &x, const VectorXd &lmbda, const ConeDims &dims) {
    x.head(dims.linear).array() *= lmbda.head(dims.linear).array();
    Index off = dims.linear, ind = dims.linear;
    for (int m : dims.psd) {
        for (int j = 0; j < m; j++) {
            for (int i = 0; i < m; i++) {
                x(off + static_cast<Index>(j) * m + i) *= 0.5 * (lmbda(ind + i) + lmbda(ind + j));
            }
        }
        off += static_cast<Index>(m) * m;
        ind += m;
    }
}

/// x := y o x for full y.
inline void sprod(VectorXd &x, const VectorXd &y, const ConeDims &dims) {
    x.head(dims.linear).array() *= y.head(dims.linear).array();
    Index off = dims.linear;
    for (int m : dims.psd) {
        Eigen::Map<MatrixXd> X(x.data() + off, m, m);
        Eigen::Map<const MatrixXd> Y(y.data() + off, m, m);
        MatrixXd P = 0.5 * (Y * X + X * Y);
        X = P;
        off += static_cast<Index>(m) * m;
    }
}

/// x := lambda o\ x for diagonal lambda.
inline void sinv(VectorXd &x, const VectorXd &lmbda, const ConeDims &dims) {
    x.head(dims.linear).array() /= lmbda.head(dims.linear).array();
    Index off = dims.linear, ind = dims.linear;
    for (int m : dims.psd) {
        for (int j = 0; j < m; j++) {
            for (int i = 0; i < m; i++) {
                x(off + static_cast<Index>(j) * m + i) /= 0.5 * (lmbda(ind + i) + lmbda(ind + j));
            }
        }
        off += static_cast<Index>(m) * m;
        ind += m;
    }
}

/// x := H(lambda^{1/2}) x, or H(lambda^{-1/2}) x when inverse.
inline void scale2(const VectorXd &lmbda, VectorXd &x, const ConeDims &dims, bool inverse) {
    if (inverse) {
        x.head(dims.linear).array() *= lmbda.head(dims.linear).array();
    } else {
        x.head(dims.linear).array() /= lmbda.head(dims.linear).array();
    }
    Index off = dims.linear, ind = dims.linear;
    for (int m : dims.psd) {
        for (int j = 0; j < m; j++) {
            for (int i = 0; i < m; i++) {
                double a = std::sqrt(lmbda(ind + i) * lmbda(ind + j));
                double &v = x(off + static_cast<Index>(j) * m + i);
                v = inverse ? v * a : v / a;
            }
        }
        off += static_cast<Index>(m) * m;
        ind += m;
    }
}

/// min { t | x + t e in cone }. When `sigma` is given, the PSD blocks of x are
/// overwritten by their eigenvectors and sigma receives the eigenvalues.
inline double max_step(VectorXd &x, const ConeDims &dims, VectorXd *sigma = nullptr) {
    std::optional<double> t;
    auto bump = [&t](double v) { t = t ? std::max(*t, v) : v; };
    if (dims.linear > 0) bump(-x.head(dims.linear).minCoeff());
    Index off = dims.linear, ind = 0;
    for (int m : dims.psd) {
        Eigen::Map<MatrixXd> X(x.data() + off, m, m);
        MatrixXd S = 0.5 * (X + X.transpose());
        if (sigma) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
            sigma->segment(ind, m) = eig.eigenvalues();
            X = eig.eigenvectors();
            if (m) bump(-eig.eigenvalues()(0));
        } else if (m) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S, Eigen::EigenvaluesOnly);
            bump(-eig.eigenvalues()(0));
        }
        off += static_cast<Index>(m) * m;
        ind += m;
    }
    return t.value_or(0.0);
}

/// Writes lambda (diagonal form) into a full cone vector.
inline VectorXd diag_to_full(const VectorXd &lmbda, const ConeDims &dims) {
    VectorXd x = VectorXd::Zero(dims.size());
    x.head(dims.linear) = lmbda.head(dims.linear);
    Index off = dims.linear, ind = dims.linear;
    for (int m : dims.psd) {
        for (int i = 0; i < m; i++) x(off + static_cast<Index>(i) * m + i) = lmbda(ind + i);
        off += static_cast<Index>(m) * m;
        ind += m;
    }
    return x;
}

inline Scaling compute_scaling(const VectorXd &s, const VectorXd &z, VectorXd &lmbda, const ConeDims &dims) {
    Scaling W;
    int l = dims.linear;
    W.d = (s.head(l).array() / z.head(l).array()).sqrt();
    W.di = W.d.cwiseInverse();
    lmbda.head(l) = (s.head(l).array() * z.head(l).array()).sqrt();
    Index off = l, ind = l;
    for (int m : dims.psd) {
        Eigen::Map<const MatrixXd> S(s.data() + off, m, m);
        Eigen::Map<const MatrixXd> Z(z.data() + off, m, m);
        Eigen::LLT<MatrixXd> cs(0.5 * (S + S.transpose()));
        Eigen::LLT<MatrixXd> cz(0.5 * (Z + Z.transpose()));
        if (cs.info() != Eigen::Success || cz.info() != Eigen::Success) {
            throw KktError("initial iterate is not in the interior of the cone");
        }
        MatrixXd Ls = cs.matrixL();
        MatrixXd Lz = cz.matrixL();
        Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
        VectorXd lam = svd.singularValues();
        VectorXd isq = lam.cwiseSqrt().cwiseInverse();
        W.r.push_back(Ls * svd.matrixV() * isq.asDiagonal());
        W.rti.push_back(Lz * svd.matrixU() * isq.asDiagonal());
        lmbda.segment(ind, m) = lam;
        off += static_cast<Index>(m) * m;
        ind += m;
    }
    return W;
}

/// s, z hold the updated iterates (linear part) and factors Ls, Lz (PSD part)
/// in the current scaling.
inline void update_scaling(Scaling &W, VectorXd &lmbda, VectorXd &s, VectorXd &z, const ConeDims &dims) {
    int l = dims.linear;
    s.head(l) = s.head(l).cwiseSqrt();
    z.head(l) = z.head(l).cwiseSqrt();
    W.d.array() *= s.head(l).array() / z.head(l).array();
    W.di = W.d.cwiseInverse();
    lmbda.head(l) = s.head(l).cwiseProduct(z.head(l));
    Index off = l, ind = l;
    for (std::size_t k = 0; k < dims.psd.size(); k++) {
        int m = dims.psd[k];
        Eigen::Map<MatrixXd> Ls(s.data() + off, m, m);
        Eigen::Map<MatrixXd> Lz(z.data() + off, m, m);
        Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
        VectorXd lam = svd.singularValues();
        VectorXd isq = lam.cwiseSqrt().cwiseInverse();
        W.r[k] = (W.r[k] * Ls * svd.matrixV() * isq.asDiagonal()).eval();
        W.rti[k] = (W.rti[k] * Lz * svd.matrixU() * isq.asDiagonal()).eval();
        lmbda.segment(ind, m) = lam;
        off += static_cast<Index>(m) * m;
        ind += m;
    }
}

/// Solves [0 A' G'; A 0 0; G 0 -W'W] [ux; uy; uz] = [bx; by; bz] on a
/// null-space basis of A. On return bz holds W uz.
class KktSolver {
   public:
    KktSolver(const ConeProgram &prog, const MatrixXd &Q1, const MatrixXd &Q2, const MatrixXd &R, const Scaling &W)
        : prog_(prog), Q1_(Q1), Q2_(Q2), R_(R), W_(W) {
        Gs_ = prog.G;
        for (Index j = 0; j < Gs_.cols(); j++) {
            scale(Gs_.col(j).data(), W, prog.dims, true, true);
        }
        // K = (Gs Q2)'(Gs Q2) = Rk' Rk without forming the Gram matrix.
        Eigen::HouseholderQR<MatrixXd> qr(Gs_ * Q2_);
        const Index m = Q2_.cols();
        Rk_ = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
        for (Index i = 0; i < m; i++) {
            double d = std::abs(Rk_(i, i));
            if (!(d > 0.0) || !std::isfinite(d)) {
                throw KktError("reduced KKT matrix is singular");
            }
        }
    }

    void solve(VectorXd &x, VectorXd &y, VectorXd &z) const {
        VectorXd wz = z;
        scale(wz, W_, prog_.dims, true, true);
        VectorXd r1 = x + Gs_.transpose() * wz;
        VectorXd ux = VectorXd::Zero(x.size());
        if (R_.rows() > 0) {
            VectorXd ux1 = R_.transpose().triangularView<Eigen::Lower>().solve(y);
            ux = Q1_ * ux1;
        }
        if (Q2_.cols() > 0) {
            VectorXd rhs = Q2_.transpose() * (r1 - Gs_.transpose() * (Gs_ * ux));
            VectorXd ux2 = Rk_.transpose().triangularView<Eigen::Lower>().solve(rhs);
            Rk_.triangularView<Eigen::Upper>().solveInPlace(ux2);
            ux += Q2_ * ux2;
        }
        if (R_.rows() > 0) {
            VectorXd res = Q1_.transpose() * (r1 - Gs_.transpose() * (Gs_ * ux));
            y = R_.triangularView<Eigen::Upper>().solve(res);
        }
        z = Gs_ * ux - wz;
        x = ux;
    }

   private:
    const ConeProgram &prog_;
    const MatrixXd &Q1_;
    const MatrixXd &Q2_;
    const MatrixXd &R_;
    const Scaling &W_;
    MatrixXd Gs_;
    MatrixXd Rk_;
};

}  // namespace detail

/// Primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and Mehrotra correction.
///
/// Dependent equality rows are removed first; inconsistent equalities are
/// reported as primal infeasible.
inline Solution solve(ConeProgram prog, const Options &opt = {}) {
    using Eigen::Index;
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    namespace d = detail;

    const ConeDims &dims = prog.dims;
    const Index n = prog.c.size();
    const Index cdim = dims.size();
    const Index cdeg = dims.degree();
    if (prog.G.rows() != cdim || prog.G.cols() != n || prog.h.size() != cdim) {
        throw std::invalid_argument("cone program: G/h shapes do not match the cone dimensions");
    }
    if (prog.A.size() == 0) {
        prog.A.resize(0, n);
        prog.b.resize(0);
    }
    if (prog.A.cols() != n || prog.A.rows() != prog.b.size()) {
        throw std::invalid_argument("cone program: A/b shapes are inconsistent");
    }

    Solution sol;
    if (prog.A.rows() > 0) {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(prog.A.transpose());
        qr.setThreshold(1e-10);
        Index rank = qr.rank();
        std::vector<Index> keep;
        for (Index i = 0; i < rank; i++) keep.push_back(qr.colsPermutation().indices()(i));
        std::sort(keep.begin(), keep.end());
        MatrixXd A(static_cast<Index>(keep.size()), n);
        VectorXd b(static_cast<Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); i++) {
            A.row(static_cast<Index>(i)) = prog.A.row(keep[i]);
            b(static_cast<Index>(i)) = prog.b(keep[i]);
        }
        VectorXd xls = A.completeOrthogonalDecomposition().solve(b);
        if ((prog.A * xls - prog.b).norm() > 1e-8 * std::max(1.0, prog.b.norm())) {
            sol.status = Status::primal_infeasible;
            sol.message = "equality constraints are inconsistent";
            return sol;
        }
        prog.A = std::move(A);
        prog.b = std::move(b);
    }
    const Index p = prog.A.rows();
    const VectorXd &c = prog.c;
    const VectorXd &h = prog.h;
    const VectorXd &bvec = prog.b;
    const MatrixXd &G = prog.G;
    const MatrixXd &A = prog.A;

    MatrixXd Q1(n, p), Q2(n, n - p), R(p, p);
    if (p > 0) {
        Eigen::HouseholderQR<MatrixXd> qr(A.transpose());
        MatrixXd Q = qr.householderQ();
        Q1 = Q.leftCols(p);
        Q2 = Q.rightCols(n - p);
        R = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    } else {
        Q2 = MatrixXd::Identity(n, n);
    }

    auto sdot = [](const VectorXd &a, const VectorXd &b) { return a.dot(b); };

    d::Scaling W = d::identity_scaling(dims);
    VectorXd x = VectorXd::Zero(n), y = bvec, s = h, z = VectorXd::Zero(cdim);
    try {
        d::KktSolver f(prog, Q1, Q2, R, W);
        f.solve(x, y, s);
        s = -s;
        VectorXd dx = -c;
        y = VectorXd::Zero(p);
        f.solve(dx, y, z);
    } catch (const KktError &) {
        throw std::invalid_argument("cone program: Rank(A) < p or Rank([G; A]) < n");
    }

    const double resx0 = std::max(1.0, c.norm());
    const double resy0 = std::max(1.0, bvec.norm());
    const double resz0 = std::max(1.0, h.norm());

    {
        double nrms = s.norm(), nrmz = z.norm();
        VectorXd tmp = s;
        double ts = d::max_step(tmp, dims);
        tmp = z;
        double tz = d::max_step(tmp, dims);
        if (ts >= -1e-8 * std::max(nrms, 1.0)) d::add_identity(s, dims, 1.0 + ts);
        if (tz >= -1e-8 * std::max(nrmz, 1.0)) d::add_identity(z, dims, 1.0 + tz);
    }

    double tau = 1.0, kappa = 1.0;
    double gap = sdot(s, z);
    double dg = 1.0, dgi = 1.0;
    std::optional<Solution> best;
    double best_merit = 0;
    VectorXd lmbda = VectorXd::Zero(cdeg + 1);
    VectorXd lmbdasq(cdeg + 1);
    VectorXd sigs(cdeg - dims.linear), sigz(cdeg - dims.linear);

    for (int iters = 0; iters <= opt.max_iterations; iters++) {
        VectorXd hrx = -(A.transpose() * y) - G.transpose() * z;
        double hresx = hrx.norm();
        VectorXd rx = hrx - c * tau;
        double resx = rx.norm() / tau;

        VectorXd hry = A * x;
        double hresy = hry.norm();
        VectorXd ry = hry - bvec * tau;
        double resy = ry.norm() / tau;

        VectorXd hrz = s + G * x;
        double hresz = hrz.norm();
        VectorXd rz = hrz - tau * h;
        double resz = rz.norm() / tau;

        double cx = c.dot(x), by = bvec.dot(y), hz = sdot(h, z);
        double rt = kappa + cx + by + hz;

        double pcost = cx / tau;
        double dcost = -(by + hz) / tau;
        std::optional<double> relgap;
        if (pcost < 0.0) {
            relgap = gap / -pcost;
        } else if (dcost > 0.0) {
            relgap = gap / dcost;
        }
        double pres = std::max(resy / resy0, resz / resz0);
        double dres = resx / resx0;
        std::optional<double> pinfres, dinfres;
        if (hz + by < 0.0) pinfres = hresx / resx0 / (-hz - by);
        if (cx < 0.0) dinfres = std::max(hresy / resy0, hresz / resz0) / (-cx);

        if (opt.verbose) {
            std::fprintf(stderr, "%3d % .8e % .8e %.1e %.1e %.1e %.1e\n", iters, pcost, dcost, gap, pres, dres,
                         kappa / tau);
        }
        auto snapshot = [&](Status status, std::string message) {
            Solution out;
            out.x = x / tau;
            out.y = y / tau;
            out.s = s / tau;
            out.z = z / tau;
            out.primal_objective = pcost;
            out.dual_objective = dcost;
            out.gap = gap;
            out.relative_gap = relgap;
            out.primal_residual = pres;
            out.dual_residual = dres;
            out.iterations = iters;
            out.status = status;
            out.message = std::move(message);
            return out;
        };
        double merit = std::max({pres, dres, relgap ? std::min(*relgap, gap) : gap});
        bool converged = pres <= opt.feastol && dres <= opt.feastol &&
                         (gap <= opt.abstol || (relgap && *relgap <= opt.reltol));
        if (converged) {
            return snapshot(Status::optimal, "");
        }
        if (!best || merit < best_merit) {
            best = snapshot(Status::optimal, "stopped early; best iterate accepted at relaxed tolerance");
            best_merit = merit;
        }
        auto give_up = [&](const std::string &why) {
            if (best && best_merit <= opt.fallback_tol) {
                best->iterations = iters;
                return *best;
            }
            return snapshot(Status::unknown, why);
        };
        if (iters == opt.max_iterations) {
            return give_up("iteration limit reached");
        }
        if (best_merit <= opt.fallback_tol && merit > 1e4 * best_merit) {
            return give_up("iterates diverged");
        }
        if (pinfres && *pinfres <= opt.feastol) {
            double scale_y = -hz - by;
            sol.y = y / scale_y;
            sol.z = z / scale_y;
            sol.x = VectorXd();
            sol.s = VectorXd();
            sol.status = Status::primal_infeasible;
            sol.primal_residual = *pinfres;
            sol.iterations = iters;
            sol.message = "certificate of primal infeasibility found";
            return sol;
        }
        if (dinfres && *dinfres <= opt.feastol) {
            sol.x = x / -cx;
            sol.s = s / -cx;
            sol.status = Status::dual_infeasible;
            sol.dual_residual = *dinfres;
            sol.iterations = iters;
            sol.message = "certificate of dual infeasibility found";
            return sol;
        }

        if (iters == 0) {
            try {
                W = d::compute_scaling(s, z, lmbda, dims);
            } catch (const KktError &e) {
                sol.status = Status::unknown;
                sol.message = e.what();
                sol.iterations = iters;
                return sol;
            }
            dg = std::sqrt(kappa / tau);
            dgi = std::sqrt(tau / kappa);
            lmbda(cdeg) = std::sqrt(tau * kappa);
        }
        lmbdasq = lmbda.cwiseProduct(lmbda);

        std::optional<d::KktSolver> f3;
        try {
            f3.emplace(prog, Q1, Q2, R, W);
        } catch (const KktError &e) {
            return give_up(std::string("terminated: ") + e.what());
        }

        // x1, y1, z1 solve the system with right-hand side -dgi (c, b, h).
        VectorXd x1 = -c, y1 = bvec, z1 = h;
        f3->solve(x1, y1, z1);
        x1 *= dgi;
        y1 *= dgi;
        z1 *= dgi;
        VectorXd th = h;
        d::scale(th, W, dims, true, true);
        const double z1sq = sdot(z1, z1);

        auto f6_no_ir = [&](VectorXd &fx, VectorXd &fy, VectorXd &fz, double &ftau, VectorXd &fs, double &fkappa) {
            fy = -fy;
            d::sinv(fs, lmbda, dims);
            fs = -fs;
            VectorXd ws3 = fs;
            d::scale(ws3, W, dims, true, false);
            fz = -(fz + ws3);
            f3->solve(fx, fy, fz);
            fkappa = -fkappa / lmbda(cdeg);
            ftau += fkappa / dgi;
            ftau = dgi * (ftau + c.dot(fx) + bvec.dot(fy) + sdot(th, fz)) / (1.0 + z1sq);
            fx += ftau * x1;
            fy += ftau * y1;
            fz += ftau * z1;
            fs -= fz;
            fkappa -= ftau;
        };

        // Residual of the Newton equations at (u*) against right-hand side (v*).
        auto res = [&](const VectorXd &ux, const VectorXd &uy, const VectorXd &uz, double utau, const VectorXd &us,
                       double ukappa, VectorXd &vx, VectorXd &vy, VectorXd &vz, double &vtau, VectorXd &vs,
                       double &vkappa) {
            VectorXd wz3 = uz;
            d::scale(wz3, W, dims, false, true);
            vx -= A.transpose() * uy + G.transpose() * wz3 + c * (utau / dg);
            vy += A * ux - bvec * (utau / dg);
            VectorXd ws3 = us;
            d::scale(ws3, W, dims, true, false);
            vz += G * ux - h * (utau / dg) + ws3;
            vtau += dg * ukappa + c.dot(ux) + bvec.dot(uy) + sdot(h, wz3);
            ws3 = us + uz;
            d::sprod_diag(ws3, lmbda, dims);
            vs += ws3;
            vkappa += lmbda(cdeg) * (utau + ukappa);
        };

        auto f6 = [&](VectorXd &fx, VectorXd &fy, VectorXd &fz, double &ftau, VectorXd &fs, double &fkappa) {
            VectorXd wx = fx, wy = fy, wz = fz, ws = fs;
            double wtau = ftau, wkappa = fkappa;
            f6_no_ir(fx, fy, fz, ftau, fs, fkappa);
            for (int i = 0; i < opt.refinement; i++) {
                VectorXd wx2 = wx, wy2 = wy, wz2 = wz, ws2 = ws;
                double wtau2 = wtau, wkappa2 = wkappa;
                res(fx, fy, fz, ftau, fs, fkappa, wx2, wy2, wz2, wtau2, ws2, wkappa2);
                f6_no_ir(wx2, wy2, wz2, wtau2, ws2, wkappa2);
                fx += wx2;
                fy += wy2;
                fz += wz2;
                fs += ws2;
                ftau += wtau2;
                fkappa += wkappa2;
            }
        };

        const double mu = lmbda.squaredNorm() / (1.0 + static_cast<double>(cdeg));
        double sigma = 0.0, eta = 0.0;
        VectorXd dx, dy, dz, ds, ws3;
        double dtau = 0, dkappa = 0, wkappa3 = 0, step = 0, tt = 0, tk = 0;
        for (int i = 0; i < 2; i++) {
            ds = d::diag_to_full(lmbdasq, dims);
            dkappa = lmbdasq(cdeg);
            if (i == 1) {
                ds += ws3;
                d::add_identity(ds, dims, -sigma * mu);
                dkappa += wkappa3 - sigma * mu;
            }
            dx = (1.0 - eta) * rx;
            dy = (1.0 - eta) * ry;
            dz = (1.0 - eta) * rz;
            dtau = (1.0 - eta) * rt;
            f6(dx, dy, dz, dtau, ds, dkappa);

            if (i == 0) {
                ws3 = ds;
                d::sprod(ws3, dz, dims);
                wkappa3 = dtau * dkappa;
            }

            d::scale2(lmbda, ds, dims, false);
            d::scale2(lmbda, dz, dims, false);
            double ts, tz;
            if (i == 0) {
                VectorXd tmp = ds;
                ts = d::max_step(tmp, dims);
                tmp = dz;
                tz = d::max_step(tmp, dims);
            } else {
                ts = d::max_step(ds, dims, &sigs);
                tz = d::max_step(dz, dims, &sigz);
            }
            tt = -dtau / lmbda(cdeg);
            tk = -dkappa / lmbda(cdeg);
            double t = std::max({0.0, ts, tz, tt, tk});
            if (t == 0.0) {
                step = 1.0;
            } else {
                step = std::min(1.0, (i == 0 ? 1.0 : opt.step) / t);
            }
            if (i == 0) {
                sigma = std::pow(1.0 - step, opt.expon);
                eta = 0.0;
            }
        }

        x += step * dx;
        y += step * dy;

        // Linear blocks: e + step * d in the current scaling. PSD blocks:
        // eigenvector factors diag(l)^{1/2} Q diag(1 + step sigma)^{1/2}.
        ds.head(dims.linear) = (ds.head(dims.linear) * step).array() + 1.0;
        dz.head(dims.linear) = (dz.head(dims.linear) * step).array() + 1.0;
        d::scale2(lmbda, ds, dims, true);
        d::scale2(lmbda, dz, dims, true);
        sigs = (sigs * step).array() + 1.0;
        sigz = (sigz * step).array() + 1.0;
        {
            Index off = dims.linear, ind = 0;
            for (int m : dims.psd) {
                for (int col = 0; col < m; col++) {
                    double l = lmbda(dims.linear + ind + col);
                    double as = std::sqrt(sigs(ind + col) / l);
                    double az = std::sqrt(sigz(ind + col) / l);
                    ds.segment(off + static_cast<Index>(col) * m, m) *= as;
                    dz.segment(off + static_cast<Index>(col) * m, m) *= az;
                }
                off += static_cast<Index>(m) * m;
                ind += m;
            }
        }
        d::update_scaling(W, lmbda, ds, dz, dims);

        dg *= std::sqrt(1.0 - step * tk) / std::sqrt(1.0 - step * tt);
        dgi = 1.0 / dg;
        lmbda(cdeg) *= std::sqrt(1.0 - step * tt) * std::sqrt(1.0 - step * tk);

        s = d::diag_to_full(lmbda, dims);
        d::scale(s, W, dims, true, false);
        z = d::diag_to_full(lmbda, dims);
        d::scale(z, W, dims, false, true);

        kappa = lmbda(cdeg) / dgi;
        tau = lmbda(cdeg) * dgi;
        gap = std::pow(lmbda.head(cdeg).norm() / tau, 2);
    }
    sol.status = Status::unknown;
    sol.message = "iteration limit reached";
    return sol;
}

}  // namespace wigmagic::conic
