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


#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wigmagic/states.hpp"
#include "wigmagic/wigner.hpp"

using namespace wigmagic;

TEST_CASE("named state amplitudes") {
    Operator s = named_state("strange");
    Eigen::VectorXcd v(3);
    v << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    CHECK((s.matrix - v * v.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

    Operator n = named_state("norrell");
    v << -1.0, 2.0, -1.0;
    v /= std::sqrt(6.0);
    CHECK((n.matrix - v * v.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::VectorXcd t = t_magic_vector();
    CHECK(std::abs(t(0) - std::polar(1 / std::sqrt(3.0), 2 * std::numbers::pi / 9)) < 1e-15);
    CHECK(std::abs(t(1) - 1 / std::sqrt(3.0)) < 1e-15);
    CHECK(std::abs(t.norm() - 1.0) < 1e-15);

    Operator mixed = named_state("maximally_mixed");
    CHECK((mixed.matrix - Eigen::MatrixXcd::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(named_state("maximally_mixed", 1, 5).matrix.rows() == 5);
    CHECK(std::abs(named_state("basis_2").matrix(2, 2) - 1.0) < 1e-15);
}

TEST_CASE("H state is the Fourier +1 eigenvector") {
    Eigen::MatrixXcd F = fourier_matrix(3);
    CHECK((F * F.adjoint() - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::VectorXcd h = h_magic_vector();
    CHECK((F * h - h).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(h.norm() - 1.0) < 1e-12);
    CHECK(h(0).real() > 0);
    CHECK(std::abs(h(0).imag()) < 1e-12);
    // Closed form for d = 3: the +1 eigenvector is proportional to (1 + sqrt3, 1, 1).
    Eigen::VectorXcd expected(3);
    expected << 1.0 + std::sqrt(3.0), 1.0, 1.0;
    expected.normalize();
    CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("named state mana ordering") {
    double s = mana(named_state("strange"));
    double n = mana(named_state("norrell"));
    double t = mana(named_state("tmagic"));
    double h = mana(named_state("hmagic"));
    CHECK(std::abs(s - n) < 1e-9);
    CHECK(n - t > 1e-3);
    CHECK(t - h > 1e-3);
    CHECK(h > 1e-3);
    for (const char *name : {"strange", "norrell", "tmagic", "hmagic"}) {
        CHECK(std::abs(mana(named_state(name, 2)) - 2 * mana(named_state(name))) < 1e-9);
    }
}

TEST_CASE("tensor powers") {
    Operator two = named_state("tmagic", 2);
    CHECK(two.dims == DimSpec({3, 3}));
    Operator one = named_state("tmagic");
    CHECK((two.matrix - one.tensor(one).matrix).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(named_state("strange", 0), std::invalid_argument);
}

TEST_CASE("bad state names") {
    CHECK_THROWS_AS(named_state("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(named_state("basis_3"), std::invalid_argument);
    CHECK_THROWS_AS(named_state("basis_x"), std::invalid_argument);
    CHECK_THROWS_AS(named_state("strange", 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(named_state("maximally_mixed", 1, 4), std::invalid_argument);
    CHECK(is_named_state("hmagic"));
    CHECK_FALSE(is_named_state("./rho.txt"));
}

TEST_CASE("state files round trip") {
    for (const char *name : {"strange", "norrell", "tmagic", "hmagic"}) {
        Operator rho = named_state(name);
        std::stringstream ss;
        write_density(ss, rho);
        Operator back = read_state(ss);
        CHECK((back.matrix - rho.matrix).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.dims == rho.dims);
    }
    std::stringstream vs;
    write_vector(vs, h_magic_vector(), DimSpec::single(3));
    CHECK((read_state(vs).matrix - named_state("hmagic").matrix).cwiseAbs().maxCoeff() < 1e-15);

    std::stringstream two;
    write_density(two, named_state("strange", 2));
    Operator back = read_state(two);
    CHECK(back.dims == DimSpec({3, 3}));
    CHECK(std::abs(mana(back) - 2 * mana(named_state("strange"))) < 1e-9);
}

TEST_CASE("state file parser rejects malformed input") {
    auto parse = [](const std::string &text) {
        std::stringstream ss(text);
        return read_state(ss);
    };
    CHECK_NOTHROW(parse("dims 3\nkind vector\n1:0 0:0 0:0\n"));
    CHECK_NOTHROW(parse("\ndims 3\n\nkind vector\n  0:0 0:1 0:0\n"));
    CHECK_THROWS_AS(parse(""), std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 2\nkind vector\n1:0 0:0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 3\nkind vector\n1:0 1:0 0:0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 3\nkind vector\n1:0 0:0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 3\nkind thing\n1:0 0:0 0:0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 3\nkind vector\n1 0 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 3\nkind density\n1:0 0:0 0:0\n0:0 0:0 0:0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 3\nkind density\n1:0 0:0 0:0\n0:0 0.5:0 0:0\n0:0 0:0 0:0\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse("dims 3\nkind density\n0.5:0 0.3:0 0:0\n0:0 0.5:0 0:0\n0:0 0:0 0:0\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse("size 3\nkind vector\n1:0 0:0 0:0\n"), std::invalid_argument);
    CHECK_THROWS_AS(read_state_file("/nonexistent/state.txt"), std::invalid_argument);
}
