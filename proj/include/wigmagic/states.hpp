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

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "wigmagic/wigner.hpp"

namespace wigmagic {

/// Unitary discrete Fourier matrix F_jk = w^{jk} / sqrt(d).
inline Eigen::MatrixXcd fourier_matrix(int d) {
    Eigen::MatrixXcd F(d, d);
    for (int j = 0; j < d; j++) {
        for (int k = 0; k < d; k++) {
            F(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), 2.0 * std::numbers::pi * ((j * k) % d) / d);
        }
    }
    return F;
}

inline Eigen::VectorXcd strange_vector() {
    Eigen::VectorXcd v(3);
    v << 0.0, 1.0, -1.0;
    return v / std::sqrt(2.0);
}

inline Eigen::VectorXcd norrell_vector() {
    Eigen::VectorXcd v(3);
    v << -1.0, 2.0, -1.0;
    return v / std::sqrt(6.0);
}

inline Eigen::VectorXcd t_magic_vector() {
    Eigen::VectorXcd v(3);
    v << std::polar(1.0, 2.0 * std::numbers::pi / 9.0), 1.0, std::polar(1.0, -2.0 * std::numbers::pi / 9.0);
    return v / std::sqrt(3.0);
}

/// The +1 eigenvector of the 3x3 unitary Fourier matrix, first nonzero
/// amplitude made real and positive.
inline Eigen::VectorXcd h_magic_vector() {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(fourier_matrix(3));
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition of the Fourier matrix failed");
    }
    std::optional<Eigen::Index> found;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); k++) {
        if (std::abs(eig.eigenvalues()(k) - 1.0) < 1e-8) {
            if (found) {
                throw std::runtime_error("+1 eigenspace of the Fourier matrix is degenerate");
            }
            found = k;
        }
    }
    if (!found) {
        throw std::runtime_error("Fourier matrix has no +1 eigenvalue");
    }
    Eigen::VectorXcd v = eig.eigenvectors().col(*found).normalized();
    for (Eigen::Index k = 0; k < v.size(); k++) {
        if (std::abs(v(k)) > 1e-12) {
            v *= std::conj(v(k)) / std::abs(v(k));
            break;
        }
    }
    return v;
}

inline Operator pure_state(const Eigen::VectorXcd &psi, const DimSpec &dims) {
    Eigen::VectorXcd v = psi.normalized();
    return Operator(v * v.adjoint(), dims);
}

/// Density operator of the `copies`-fold tensor power of a named state.
///
/// Recognized names: strange, norrell, tmagic, hmagic (qutrit only),
/// basis_<k> and maximally_mixed (any odd `dim`).
inline Operator named_state(std::string_view name, int copies = 1, int dim = 3) {
    if (copies < 1) {
        throw std::invalid_argument("copies must be >= 1");
    }
    DimSpec::require_odd_dimension(dim);
    auto qutrit_only = [&](const Eigen::VectorXcd &v) {
        if (dim != 3) {
            throw std::invalid_argument(std::string(name) + " is a qutrit state; dim must be 3");
        }
        return pure_state(v, DimSpec::single(3));
    };
    Operator one;
    if (name == "strange") {
        one = qutrit_only(strange_vector());
    } else if (name == "norrell") {
        one = qutrit_only(norrell_vector());
    } else if (name == "tmagic") {
        one = qutrit_only(t_magic_vector());
    } else if (name == "hmagic") {
        one = qutrit_only(h_magic_vector());
    } else if (name == "maximally_mixed") {
        one = Operator(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim), DimSpec::single(dim));
    } else if (name.starts_with("basis_")) {
        auto digits = name.substr(6);
        int k = -1;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || k < 0 || k >= dim) {
            throw std::invalid_argument("bad basis state name: " + std::string(name));
        }
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v(k) = 1.0;
        one = pure_state(v, DimSpec::single(dim));
    } else {
        throw std::invalid_argument("unknown state name: " + std::string(name));
    }
    Operator out = one;
    for (int c = 1; c < copies; c++) {
        out = out.tensor(one);
    }
    return out;
}

inline bool is_named_state(std::string_view name) {
    return name == "strange" || name == "norrell" || name == "tmagic" || name == "hmagic" ||
           name == "maximally_mixed" || name.starts_with("basis_");
}

// State file format:
//   dims d1 d2 ...
//   kind vector|density
//   one matrix row per line (or the single vector line) of re:im pairs.

/// Tolerance for normalization checks when reading state files.
inline constexpr double kStateFileTolerance = 1e-6;

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

inline complex_t parse_complex_token(const std::string &token) {
    auto colon = token.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("expected re:im, got '" + token + "'");
    }
    auto parse = [&](std::string_view s) {
        double v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw std::invalid_argument("bad number in '" + token + "'");
        }
        return v;
    };
    std::string_view sv(token);
    return {parse(sv.substr(0, colon)), parse(sv.substr(colon + 1))};
}

inline std::vector<complex_t> parse_row(const std::string &line) {
    std::istringstream in(line);
    std::vector<complex_t> out;
    std::string token;
    while (in >> token) {
        out.push_back(parse_complex_token(token));
    }
    return out;
}

inline bool next_content_line(std::istream &in, std::string &line) {
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline Operator read_state(std::istream &in) {
    std::string line;
    if (!detail::next_content_line(in, line)) {
        throw std::invalid_argument("state file is empty");
    }
    std::istringstream header(line);
    std::string keyword;
    header >> keyword;
    if (keyword != "dims") {
        throw std::invalid_argument("state file must start with 'dims'");
    }
    std::vector<int> dims;
    std::string token;
    while (header >> token) {
        int d = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), d);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            throw std::invalid_argument("bad dimension '" + token + "'");
        }
        dims.push_back(d);
    }
    DimSpec spec(dims);
    int D = spec.total();

    if (!detail::next_content_line(in, line)) {
        throw std::invalid_argument("state file is missing the 'kind' line");
    }
    std::istringstream kind_line(line);
    std::string kind;
    kind_line >> keyword >> kind;
    if (keyword != "kind" || (kind != "vector" && kind != "density")) {
        throw std::invalid_argument("expected 'kind vector' or 'kind density'");
    }

    if (kind == "vector") {
        if (!detail::next_content_line(in, line)) {
            throw std::invalid_argument("state file is missing the amplitude line");
        }
        auto row = detail::parse_row(line);
        if (static_cast<int>(row.size()) != D) {
            throw std::invalid_argument("expected " + std::to_string(D) + " amplitudes");
        }
        Eigen::VectorXcd psi = Eigen::Map<Eigen::VectorXcd>(row.data(), D);
        if (std::abs(psi.norm() - 1.0) > kStateFileTolerance) {
            throw std::invalid_argument("state vector is not normalized");
        }
        return Operator(psi * psi.adjoint(), spec);
    }

    Eigen::MatrixXcd rho(D, D);
    for (int r = 0; r < D; r++) {
        if (!detail::next_content_line(in, line)) {
            throw std::invalid_argument("density matrix has too few rows");
        }
        auto row = detail::parse_row(line);
        if (static_cast<int>(row.size()) != D) {
            throw std::invalid_argument("density matrix row " + std::to_string(r) + " has the wrong length");
        }
        for (int c = 0; c < D; c++) {
            rho(r, c) = row[static_cast<std::size_t>(c)];
        }
    }
    if (std::abs(rho.trace() - 1.0) > kStateFileTolerance) {
        throw std::invalid_argument("density matrix does not have unit trace");
    }
    if (!is_hermitian(rho, kStateFileTolerance)) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    return Operator(0.5 * (rho + rho.adjoint()), spec);
}

inline Operator read_state_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open state file '" + path + "'");
    }
    return read_state(in);
}

inline void write_density(std::ostream &out, const Operator &rho) {
    out << "dims";
    for (int d : rho.dims.dims()) {
        out << ' ' << d;
    }
    out << "\nkind density\n";
    for (Eigen::Index r = 0; r < rho.matrix.rows(); r++) {
        for (Eigen::Index c = 0; c < rho.matrix.cols(); c++) {
            if (c) out << ' ';
            out << detail::format_double(rho.matrix(r, c).real()) << ':'
                << detail::format_double(rho.matrix(r, c).imag());
        }
        out << '\n';
    }
}

inline void write_vector(std::ostream &out, const Eigen::VectorXcd &psi, const DimSpec &dims) {
    if (psi.size() != dims.total()) {
        throw std::invalid_argument("vector length does not match dims");
    }
    out << "dims";
    for (int d : dims.dims()) {
        out << ' ' << d;
    }
    out << "\nkind vector\n";
    for (Eigen::Index k = 0; k < psi.size(); k++) {
        if (k) out << ' ';
        out << detail::format_double(psi(k).real()) << ':' << detail::format_double(psi(k).imag());
    }
    out << '\n';
}

}  // namespace wigmagic
