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
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "random_ops.hpp"
#include "wigmagic/lp_oracle.hpp"
#include "wigmagic/states.hpp"
#include "wigmagic/transform.hpp"

using namespace wigmagic;
using namespace wigmagic::testing;

namespace {

void check_certificate(const Eigen::MatrixXd &W, const Eigen::VectorXd &p, const Eigen::VectorXd &q) {
    CHECK(W.minCoeff() >= -1e-12);
    CHECK((W.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
    CHECK((W * p - q).cwiseAbs().maxCoeff() <= 1e-9);
}

}  // namespace

TEST_CASE("block construction on a small example") {
    Eigen::VectorXd p(3), q(3);
    p << 0.9, 0.6, -0.5;
    q << 0.7, 0.5, -0.2;
    Eigen::MatrixXd expected(3, 3);
    expected << 7.0 / 15, 7.0 / 15, 0, 5.0 / 15, 5.0 / 15, 0, 0.2, 0.2, 1;
    Eigen::MatrixXd W = construct_column_stochastic(p, q);
    CHECK((W - expected).cwiseAbs().maxCoeff() < 1e-12);
    check_certificate(W, p, q);
}

TEST_CASE("block construction on permuted and degenerate inputs") {
    Eigen::VectorXd p(4), q(4);
    p << -0.5, 0.9, 0.0, 0.6;
    q << 0.5, -0.1, 0.7, -0.1;
    check_certificate(construct_column_stochastic(p, q), p, q);

    Eigen::VectorXd prob(3);
    prob << 0.2, 0.3, 0.5;
    check_certificate(construct_column_stochastic(prob, prob), prob, prob);
    check_certificate(Eigen::MatrixXd::Identity(3, 3), prob, prob);

    // Nonnegative target from a source with negative entries.
    check_certificate(construct_column_stochastic(p, prob.head(3).eval()), p, prob);

    Eigen::VectorXd single(1);
    single << 1.0;
    check_certificate(construct_column_stochastic(single, prob), single, prob);
}

TEST_CASE("block construction rejects infeasible and malformed inputs") {
    Eigen::VectorXd p(3), q(3);
    p << 0.9, 0.6, -0.5;
    q << 1.6, -0.3, -0.3;
    CHECK_THROWS_AS(construct_column_stochastic(p, q), InfeasibleTransformError);
    Eigen::VectorXd prob(3);
    prob << 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(construct_column_stochastic(prob, p), InfeasibleTransformError);
    Eigen::VectorXd bad(3);
    bad << 0.2, 0.3, 0.4;
    CHECK_THROWS_AS(construct_column_stochastic(bad, prob), std::invalid_argument);
    CHECK_THROWS_AS(construct_column_stochastic(Eigen::VectorXd(), prob), std::invalid_argument);
}

TEST_CASE("rectangular constructions") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; trial++) {
        Eigen::VectorXd p = random_quasi_probability(rng, 9, 0.4);
        Eigen::VectorXd q = random_quasi_probability(rng, 25, 0.05);
        bool ok = p.cwiseAbs().sum() >= q.cwiseAbs().sum();
        if (ok) {
            check_certificate(construct_column_stochastic(p, q), p, q);
        } else {
            CHECK_THROWS_AS(construct_column_stochastic(p, q), InfeasibleTransformError);
        }
        CHECK(lp_feasibility_oracle(p, q) == ok);
    }
}

TEST_CASE("LP oracle agrees with the l1 criterion and the construction") {
    std::mt19937_64 rng(42);
    int feasible = 0;
    for (int trial = 0; trial < 300; trial++) {
        Eigen::VectorXd p = random_quasi_probability(rng, 9, 0.3);
        Eigen::VectorXd q = random_quasi_probability(rng, 9, 0.3);
        bool expected = p.cwiseAbs().sum() >= q.cwiseAbs().sum();
        CHECK(lp_feasibility_oracle(p, q) == expected);
        bool built = true;
        try {
            check_certificate(construct_column_stochastic(p, q), p, q);
        } catch (const InfeasibleTransformError &) {
            built = false;
        }
        CHECK(built == expected);
        feasible += expected;
    }
    CHECK(feasible > 50);
    CHECK(feasible < 250);
}

TEST_CASE("LP oracle accepts equal-norm pairs") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; trial++) {
        Eigen::VectorXd p = random_quasi_probability(rng, 9, 0.3);
        std::vector<int> perm(9);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::VectorXd q(9);
        for (int i = 0; i < 9; i++) q(i) = p(perm[static_cast<std::size_t>(i)]);
        CHECK(lp_feasibility_oracle(p, q));
        check_certificate(construct_column_stochastic(p, q), p, q);
    }
    Eigen::VectorXd uniform = Eigen::VectorXd::Constant(9, 1.0 / 9);
    CHECK(lp_feasibility_oracle(uniform, uniform));
}

TEST_CASE("linear_feasible on small systems") {
    Eigen::MatrixXd A(2, 3);
    A << 1, 1, 1, 1, -1, 0;
    Eigen::VectorXd b(2);
    b << 1, 0.5;
    CHECK(linear_feasible(A, b));
    b << 1, 2;
    CHECK_FALSE(linear_feasible(A, b));
    b << -1, 0;
    CHECK_FALSE(linear_feasible(A, b));
}

TEST_CASE("stochastic matrices never increase the l1 norm") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 200; trial++) {
        Eigen::VectorXd p = random_quasi_probability(rng, 9, 0.5);
        Eigen::MatrixXd W = random_column_stochastic(rng, 9, 9);
        CHECK((W * p).cwiseAbs().sum() <= p.cwiseAbs().sum() + 1e-12);
    }
}

TEST_CASE("conversions between named states") {
    Operator s = named_state("strange"), n = named_state("norrell");
    Operator t = named_state("tmagic"), h = named_state("hmagic");
    CHECK(can_transform(s, n));
    CHECK(can_transform(n, s));
    CHECK(can_transform(s, s));
    CHECK(can_transform(t, h));
    CHECK_FALSE(can_transform(h, s));
    CHECK_FALSE(can_transform(t, n));
    CHECK(lp_feasibility_oracle(wigner_of_operator(s), wigner_of_operator(n)));
    CHECK_FALSE(lp_feasibility_oracle(wigner_of_operator(h), wigner_of_operator(s)));

    auto plan = plan_transform(s, n);
    REQUIRE(plan.feasible);
    REQUIRE(plan.stochastic_map.has_value());
    auto out = apply_stochastic(*plan.stochastic_map, wigner_of_operator(s));
    CHECK((out.values - wigner_of_operator(n).values).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(plan.mana_source == Catch::Approx(plan.mana_target).margin(1e-12));

    auto no = plan_transform(h, s);
    CHECK_FALSE(no.feasible);
    CHECK_FALSE(no.stochastic_map.has_value());

    auto two = plan_transform(s.tensor(s), t);
    REQUIRE(two.feasible);
    CHECK(two.stochastic_map->values.rows() == 9);
    CHECK(two.stochastic_map->values.cols() == 81);
}

TEST_CASE("mana-feasible random state pairs map through the lifted channel") {
    std::mt19937_64 rng(45);
    DimSpec q = DimSpec::single(3);
    int checked = 0;
    for (int trial = 0; trial < 40; trial++) {
        Operator rho = random_pure_state(rng, q);
        Operator sigma = random_mixed_state(rng, q, 2);
        if (!can_transform(rho, sigma)) std::swap(rho, sigma);
        REQUIRE(can_transform(rho, sigma));
        auto plan = plan_transform(rho, sigma);
        ChoiMatrix J = map_from_wigner(*plan.stochastic_map);
        CHECK(classify(J).pwpq());
        CHECK((apply_choi(J, rho).matrix - sigma.matrix).cwiseAbs().maxCoeff() < 1e-8);
        checked++;
    }
    CHECK(checked == 40);
}

TEST_CASE("asymptotic rates") {
    Operator s = named_state("strange"), n = named_state("norrell");
    Operator t = named_state("tmagic"), h = named_state("hmagic");
    CHECK(asymptotic_rate(s, s) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(asymptotic_rate(named_state("strange", 2), s) - 2.0) < 1e-9);
    CHECK(std::abs(asymptotic_rate(t, h) * asymptotic_rate(h, t) - 1.0) < 1e-12);
    CHECK(asymptotic_rate(s, n) == Catch::Approx(1.0).margin(1e-9));
    CHECK(asymptotic_rate(s, named_state("basis_0")) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(asymptotic_rate(named_state("maximally_mixed"), s), std::domain_error);

    std::mt19937_64 rng(46);
    DimSpec q = DimSpec::single(3);
    for (int trial = 0; trial < 50; trial++) {
        Operator a = random_pure_state(rng, q), b = random_pure_state(rng, q);
        if (mana(a) < 1e-3 || mana(b) < 1e-3) continue;
        CHECK(std::abs(asymptotic_rate(a, b) * asymptotic_rate(b, a) - 1.0) < 1e-12);
    }
}
