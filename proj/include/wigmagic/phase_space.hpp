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

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace wigmagic {

using complex_t = std::complex<double>;

/// Default absolute entrywise tolerance for operator identities.
inline constexpr double kOperatorTolerance = 1e-10;

/// Ordered list of odd local dimensions (each >= 3) describing a composite
/// qudit system. The first factor is the most significant tensor index.
class DimSpec {
   public:
    DimSpec() = default;

    explicit DimSpec(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) {
            throw std::invalid_argument("DimSpec needs at least one subsystem");
        }
        for (int d : dims_) {
            require_odd_dimension(d);
        }
    }

    static DimSpec single(int d) { return DimSpec(std::vector<int>{d}); }

    static void require_odd_dimension(int d) {
        if (d < 3 || d % 2 == 0) {
            throw std::invalid_argument(
                "dimension must be odd and at least 3, got " + std::to_string(d));
        }
    }

    const std::vector<int> &dims() const { return dims_; }
    std::size_t num_subsystems() const { return dims_.size(); }
    bool empty() const { return dims_.empty(); }

    /// Hilbert-space dimension D = prod d_i.
    int total() const {
        int D = 1;
        for (int d : dims_) {
            D *= d;
        }
        return D;
    }

    /// Number of phase-space points D^2.
    int num_points() const {
        int D = total();
        return D * D;
    }

    DimSpec tensor(const DimSpec &other) const {
        std::vector<int> out = dims_;
        out.insert(out.end(), other.dims_.begin(), other.dims_.end());
        return DimSpec(std::move(out));
    }

    /// Tensor power with `copies` factors.
    DimSpec power(int copies) const {
        if (copies < 1) {
            throw std::invalid_argument("copies must be >= 1");
        }
        std::vector<int> out;
        for (int k = 0; k < copies; k++) {
            out.insert(out.end(), dims_.begin(), dims_.end());
        }
        return DimSpec(std::move(out));
    }

    std::string str() const {
        std::string out;
        for (std::size_t k = 0; k < dims_.size(); k++) {
            if (k) out += 'x';
            out += std::to_string(dims_[k]);
        }
        return out;
    }

    bool operator==(const DimSpec &) const = default;

   private:
    std::vector<int> dims_;
};

/// A point of the discrete phase space: one (u1, u2) pair per subsystem.
struct PhasePoint {
    std::vector<std::pair<int, int>> coords;

    bool operator==(const PhasePoint &) const = default;
};

/// Flattened index of a phase point. Each subsystem contributes u1 * d + u2;
/// subsystems are combined in row-major tensor order.
inline std::size_t point_index(const DimSpec &spec, const PhasePoint &u) {
    if (u.coords.size() != spec.num_subsystems()) {
        throw std::invalid_argument("phase point has wrong number of subsystems");
    }
    std::size_t index = 0;
    for (std::size_t k = 0; k < u.coords.size(); k++) {
        int d = spec.dims()[k];
        auto [u1, u2] = u.coords[k];
        if (u1 < 0 || u1 >= d || u2 < 0 || u2 >= d) {
            throw std::invalid_argument("phase point coordinate out of range");
        }
        index = index * static_cast<std::size_t>(d * d) + static_cast<std::size_t>(u1 * d + u2);
    }
    return index;
}

inline PhasePoint point_at(const DimSpec &spec, std::size_t index) {
    if (index >= static_cast<std::size_t>(spec.num_points())) {
        throw std::out_of_range("phase point index out of range");
    }
    PhasePoint u;
    u.coords.resize(spec.num_subsystems());
    for (std::size_t k = spec.num_subsystems(); k-- > 0;) {
        auto d = static_cast<std::size_t>(spec.dims()[k]);
        std::size_t local = index % (d * d);
        index /= d * d;
        u.coords[k] = {static_cast<int>(local / d), static_cast<int>(local % d)};
    }
    return u;
}

/// Returns the shift X|j> = |j+1 mod d> and the boost Z|j> = w^j |j>,
/// w = exp(2 pi i / d).
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> shift_boost(int d) {
    DimSpec::require_odd_dimension(d);
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; j++) {
        X((j + 1) % d, j) = 1.0;
        Z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
    }
    return {X, Z};
}

/// Heisenberg-Weyl operator tau^{-u1 u2} Z^{u1} X^{u2}, tau = exp((d+1) pi i / d).
inline Eigen::MatrixXcd weyl_operator(int d, int u1, int u2) {
    DimSpec::require_odd_dimension(d);
    if (u1 < 0 || u1 >= d || u2 < 0 || u2 >= d) {
        throw std::invalid_argument("Weyl operator coordinates must be reduced mod d");
    }
    // tau^d = 1 for odd d, so the exponent can be reduced mod d.
    int k = (u1 * u2) % d;
    complex_t phase = std::polar(1.0, -std::numbers::pi * (d + 1) * k / d);
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; j++) {
        // Z^{u1} X^{u2} |j> = w^{u1 (j + u2)} |j + u2>
        int row = (j + u2) % d;
        T(row, j) = phase * std::polar(1.0, 2.0 * std::numbers::pi * ((u1 * row) % d) / d);
    }
    return T;
}

namespace detail {

struct SingleSystemOperators {
    int d = 0;
    std::vector<Eigen::MatrixXcd> point_ops;  // indexed by u1 * d + u2
};

inline SingleSystemOperators build_single_system(int d) {
    SingleSystemOperators ops;
    ops.d = d;
    Eigen::MatrixXcd A0 = Eigen::MatrixXcd::Zero(d, d);
    std::vector<Eigen::MatrixXcd> weyl;
    weyl.reserve(static_cast<std::size_t>(d * d));
    for (int u1 = 0; u1 < d; u1++) {
        for (int u2 = 0; u2 < d; u2++) {
            weyl.push_back(weyl_operator(d, u1, u2));
            A0 += weyl.back();
        }
    }
    A0 /= static_cast<double>(d);
    ops.point_ops.reserve(weyl.size());
    for (const auto &T : weyl) {
        Eigen::MatrixXcd A = T * A0 * T.adjoint();
        // Exact Hermiticity; the construction only leaves rounding noise.
        ops.point_ops.push_back(0.5 * (A + A.adjoint()));
    }
    return ops;
}

}  // namespace detail

/// Phase-point operators A_u of a single odd-dimensional system, built once
/// per dimension and shared immutably.
inline const std::vector<Eigen::MatrixXcd> &single_system_point_operators(int d) {
    DimSpec::require_odd_dimension(d);
    static std::mutex mu;
    static std::map<int, std::unique_ptr<const detail::SingleSystemOperators>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it == cache.end()) {
        auto ops = std::make_unique<const detail::SingleSystemOperators>(detail::build_single_system(d));
        it = cache.emplace(d, std::move(ops)).first;
    }
    return it->second->point_ops;
}

/// A_u for a (possibly composite) system: the tensor product of the
/// single-system point operators of each coordinate pair.
inline Eigen::MatrixXcd phase_point_operator(const DimSpec &spec, const PhasePoint &u) {
    if (u.coords.size() != spec.num_subsystems()) {
        throw std::invalid_argument("phase point does not match dimension spec");
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t k = 0; k < u.coords.size(); k++) {
        int d = spec.dims()[k];
        auto [u1, u2] = u.coords[k];
        if (u1 < 0 || u1 >= d || u2 < 0 || u2 >= d) {
            throw std::invalid_argument("phase point coordinate out of range");
        }
        const auto &local = single_system_point_operators(d)[static_cast<std::size_t>(u1 * d + u2)];
        Eigen::MatrixXcd next = Eigen::kroneckerProduct(out, local);
        out = std::move(next);
    }
    return out;
}

/// All D^2 phase-point operators of `spec` in flattened-index order.
/// Composite sets are cached per dimension spec.
inline const std::vector<Eigen::MatrixXcd> &point_operators(const DimSpec &spec) {
    if (spec.empty()) {
        throw std::invalid_argument("empty dimension spec");
    }
    if (spec.num_subsystems() == 1) {
        return single_system_point_operators(spec.dims()[0]);
    }
    static std::mutex mu;
    static std::map<std::vector<int>, std::unique_ptr<const std::vector<Eigen::MatrixXcd>>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(spec.dims());
        if (it != cache.end()) {
            return *it->second;
        }
    }
    auto ops = std::make_unique<std::vector<Eigen::MatrixXcd>>();
    auto n = static_cast<std::size_t>(spec.num_points());
    ops->reserve(n);
    for (std::size_t i = 0; i < n; i++) {
        ops->push_back(phase_point_operator(spec, point_at(spec, i)));
    }
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(spec.dims(), std::move(ops));
    return *it->second;
}

}  // namespace wigmagic
