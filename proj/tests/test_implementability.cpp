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
#include <random>
#include <string>
#include <vector>

#include "random_ops.hpp"
#include "wigmagic/implementability.hpp"
#include "wigmagic/states.hpp"
#include "wigmagic/transform.hpp"

using namespace wigmagic;
using namespace wigmagic::testing;

namespace {

double min_eigenvalue(const Eigen::MatrixXcd &M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

double operator_norm(const Eigen::MatrixXcd &M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Checks every constraint of the decomposition directly on the Choi pair.
void check_certificate(const Operator &rho, const Operator &sigma, double eps, const SdpOutcome &r) {
    const auto &[J1, J2] = r.choi_pair;
    const double c = r.c_star;
    const int DA = rho.dims.total();
    CHECK(c >= 1 - 1e-7);
    CHECK(std::abs(std::exp2(r.nu) - (2 * c - 1)) < 1e-9);
    CHECK(min_eigenvalue(J1.matrix) >= -1e-6);
    CHECK(min_eigenvalue(J2.matrix) >= -1e-6);
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(DA, DA);
    CHECK((trace_out_output(J1) - c * I).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((trace_out_output(J2) - (c - 1) * I).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(wigner_of_map(J1).values.minCoeff() >= -1e-6);
    CHECK(wigner_of_map(J2).values.minCoeff() >= -1e-6);
    ChoiMatrix JN(J1.matrix - J2.matrix, J1.input, J1.output);
    CHECK(wigner_of_map(JN).values.minCoeff() >= -1e-6);
    Eigen::MatrixXcd diff = apply_choi_blocks(JN.matrix, rho.matrix, sigma.dims.total()) - sigma.matrix;
    CHECK(operator_norm(diff) <= eps + 1e-6);
    CHECK(r.duality_gap <= 1e-7);
}

}  // namespace

TEST_CASE("model admits explicit certificates") {
    Operator s = named_state("strange"), h = named_state("hmagic");
    SdpModel same = build_sdp(s, s, 0.0);
    DimSpec q = DimSpec::single(3);
    ChoiMatrix zero(Eigen::MatrixXcd::Zero(9, 9), q, q);
    CHECK(same.admits(same.pack(identity_channel(q), zero, 1.0)));
    CHECK(same.objective(same.pack(identity_channel(q), zero, 1.0)) == Catch::Approx(1.0));
    CHECK_FALSE(same.admits(same.pack(completely_depolarizing_channel(q, q), zero, 1.0)));

    SdpModel loose = build_sdp(h, s, 1.0);
    CHECK(loose.admits(loose.pack(completely_depolarizing_channel(q, q), zero, 1.0)));
    CHECK(loose.num_variables() == 2 * 81 + 1);

    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 5; trial++) {
        Operator a = random_mixed_state(rng, q, 2), b = random_pure_state(rng, q);
        SdpModel m = build_sdp(a, b, 1.0);
        CHECK(m.admits(m.pack(completely_depolarizing_channel(q, q), zero, 1.0)));
    }
    CHECK_THROWS_AS(build_sdp(s, s, -0.1), std::invalid_argument);
}

TEST_CASE("Hermitian embedding round trip") {
    std::mt19937_64 rng(62);
    Eigen::MatrixXcd H = random_hermitian(rng, 4);
    Eigen::VectorXd e = detail::embed_hermitian(H);
    CHECK((detail::unembed_hermitian(e.data(), 4) - H).cwiseAbs().maxCoeff() < 1e-15);
    Eigen::Map<const Eigen::MatrixXd> E(e.data(), 8, 8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ee(E);
    CHECK(std::abs(eh.eigenvalues()(0) - ee.eigenvalues()(0)) < 1e-12);
}

TEST_CASE("identity transformations are physical") {
    std::mt19937_64 rng(63);
    DimSpec q = DimSpec::single(3);
    std::vector<Operator> states = {named_state("strange"), named_state("hmagic"), random_mixed_state(rng, q, 2)};
    for (const auto &rho : states) {
        auto r = physical_implementability(rho, rho, 0.0);
        REQUIRE(r.status == SdpStatus::optimal);
        CHECK(std::abs(r.nu) < 1e-5);
        check_certificate(rho, rho, 0.0, r);
        CHECK(classify(r.choi_pair.first).cptp_pwp());
        CHECK(r.choi_pair.second.matrix.cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("strange and norrell conversions") {
    Operator s = named_state("strange"), n = named_state("norrell");
    auto forward = physical_implementability(s, n, 0.0);
    REQUIRE(forward.status == SdpStatus::optimal);
    CHECK(std::abs(forward.nu) < 1e-5);
    check_certificate(s, n, 0.0, forward);
    CHECK(classify(forward.choi_pair.first).cptp_pwp());

    auto back = physical_implementability(n, s, 0.0);
    REQUIRE(back.status == SdpStatus::optimal);
    CHECK(back.nu > 1e-3);
    check_certificate(n, s, 0.0, back);
}

TEST_CASE("exact feasibility matches the mana criterion") {
    std::vector<std::string> names = {"strange", "norrell", "tmagic", "hmagic"};
    for (const auto &a : names) {
        for (const auto &b : names) {
            if (a == b) continue;
            Operator rho = named_state(a), sigma = named_state(b);
            auto r = physical_implementability(rho, sigma, 0.0);
            REQUIRE(r.status != SdpStatus::solver_error);
            CHECK((r.status == SdpStatus::optimal) == can_transform(rho, sigma));
            if (r.status == SdpStatus::optimal) check_certificate(rho, sigma, 0.0, r);
        }
    }
}

TEST_CASE("infeasibility is certified by the threshold bound") {
    Operator t = named_state("tmagic"), s = named_state("strange");
    auto th = feasibility_threshold(t, s);
    REQUIRE(th.status == conic::Status::optimal);
    CHECK(th.lower > 0.05);
    CHECK(th.upper - th.lower < 1e-6);

    auto below = physical_implementability(t, s, th.lower - 1e-3);
    CHECK(below.status == SdpStatus::infeasible);
    double eps = th.upper + 1e-4;
    auto above = physical_implementability(t, s, eps);
    REQUIRE(above.status == SdpStatus::optimal);
    check_certificate(t, s, eps, above);
}

TEST_CASE("threshold bisection brackets the certified bound") {
    Operator h = named_state("hmagic"), n = named_state("norrell");
    auto th = feasibility_threshold(h, n);
    REQUIRE(th.status == conic::Status::optimal);
    double b = bisect_feasibility_threshold(h, n, 0.0, 0.5, 1e-3);
    CHECK(b >= th.lower - 1e-6);
    CHECK(b <= th.lower + 1e-3 + 1e-6);
    CHECK(bisect_feasibility_threshold(named_state("strange"), n, 0.0, 0.5) == 0.0);
}

TEST_CASE("implementability is non-increasing in the error") {
    Operator n = named_state("norrell"), s = named_state("strange"), t = named_state("tmagic");
    for (auto [rho, sigma] : {std::pair{n, s}, std::pair{t, n}}) {
        double prev = std::numeric_limits<double>::infinity();
        int feasible = 0;
        for (int k = 0; k <= 10; k++) {
            double eps = 0.05 * k;
            auto r = physical_implementability(rho, sigma, eps);
            REQUIRE(r.status != SdpStatus::solver_error);
            if (r.status != SdpStatus::optimal) {
                CHECK(feasible == 0);
                continue;
            }
            feasible++;
            CHECK(r.nu <= prev + 1e-6);
            prev = r.nu;
            check_certificate(rho, sigma, eps, r);
        }
        CHECK(feasible > 5);
        CHECK(std::abs(prev) < 1e-5);
    }
}

TEST_CASE("oversized programs are refused") {
    Operator big = named_state("strange", 2);
    CHECK_THROWS_AS(build_sdp(big, big, 0.0), std::invalid_argument);
}

TEST_CASE("sampling cost") {
    CHECK(sampling_cost(0.0, 0.1, 0.05) == 738);
    CHECK(sampling_cost(0.5, 0.1, 0.05) == 1476);
    CHECK(std::abs(sampling_bound(1.0, 0.1, 0.05) - 4 * sampling_bound(0.0, 0.1, 0.05)) < 1e-9);
    CHECK(std::abs(sampling_bound(0.3, 0.05, 0.01) - 4 * sampling_bound(0.3, 0.1, 0.01)) < 1e-9);
    CHECK(std::abs(sampling_bound(0.0, 0.1, 0.05) - 200 * std::log(40.0)) < 1e-9);
    CHECK_THROWS_AS(sampling_cost(0.0, 0.1, 2.0), std::domain_error);
    CHECK_THROWS_AS(sampling_cost(0.0, 0.1, 0.0), std::domain_error);
    CHECK_THROWS_AS(sampling_cost(0.0, 0.0, 0.05), std::domain_error);
    CHECK_THROWS_AS(sampling_cost(-1.0, 0.1, 0.05), std::domain_error);
}
