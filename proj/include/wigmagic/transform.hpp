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
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wigmagic/wigner.hpp"

namespace wigmagic {

/// Slack allowed when comparing mana values or l1-norms.
inline constexpr double kManaTolerance = 1e-9;

/// Entries with magnitude at or below this are grouped with the positive block.
inline constexpr double kZeroEntry = 1e-12;

/// Raised when the source has strictly less Wigner negativity than the target.
class InfeasibleTransformError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

struct TransformPlan {
    bool feasible = false;
    std::optional<StochasticWignerMatrix> stochastic_map;
    double mana_source = 0;
    double mana_target = 0;
};

inline bool can_transform(const Operator &rho, const Operator &sigma) {
    return mana(rho) >= mana(sigma) - kManaTolerance;
}

/// Column-stochastic W with W p = q for quasi-probability vectors summing to
/// one, built block-wise on the sign pattern of p and q. Throws
/// InfeasibleTransformError when ||p||_1 < ||q||_1.
inline Eigen::MatrixXd construct_column_stochastic(const Eigen::VectorXd &p, const Eigen::VectorXd &q) {
    if (p.size() == 0 || q.size() == 0) {
        throw std::invalid_argument("empty quasi-probability vector");
    }
    if (std::abs(p.sum() - 1.0) > kManaTolerance || std::abs(q.sum() - 1.0) > kManaTolerance) {
        throw std::invalid_argument("quasi-probability vectors must sum to 1");
    }
    double p_l1 = p.cwiseAbs().sum();
    double q_l1 = q.cwiseAbs().sum();
    if (p_l1 < q_l1 - kManaTolerance) {
        throw InfeasibleTransformError("source l1-norm " + std::to_string(p_l1) + " is below target l1-norm " +
                                       std::to_string(q_l1));
    }

    std::vector<Eigen::Index> p_pos, p_neg, q_pos, q_neg;
    for (Eigen::Index i = 0; i < p.size(); i++) {
        (p(i) < -kZeroEntry ? p_neg : p_pos).push_back(i);
    }
    for (Eigen::Index i = 0; i < q.size(); i++) {
        (q(i) < -kZeroEntry ? q_neg : q_pos).push_back(i);
    }

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(q.size(), p.size());
    if (q_neg.empty()) {
        // Every column equal to q gives W p = q (sum p) = q.
        W.colwise() = q;
        return W;
    }

    double p_plus = 0, p_minus = 0;
    for (auto i : p_pos) p_plus += p(i);
    for (auto i : p_neg) p_minus -= p(i);
    if (p_neg.empty() || p_minus <= 0) {
        throw InfeasibleTransformError("target has negative entries but source has none");
    }

    // Rows: positive part of q, all but the last negative entry, then the
    // last negative entry which absorbs the remaining column mass.
    Eigen::Index last = q_neg.back();
    double q_plus = 0, q_minus_hat = 0;
    for (auto i : q_pos) q_plus += q(i);
    for (std::size_t k = 0; k + 1 < q_neg.size(); k++) q_minus_hat -= q(q_neg[k]);

    for (auto j : p_pos) {
        for (auto i : q_pos) W(i, j) = q(i) / p_plus;
        W(last, j) = 1.0 - q_plus / p_plus;
    }
    for (auto j : p_neg) {
        for (std::size_t k = 0; k + 1 < q_neg.size(); k++) W(q_neg[k], j) = -q(q_neg[k]) / p_minus;
        W(last, j) = 1.0 - q_minus_hat / p_minus;
    }
    return W;
}

inline StochasticWignerMatrix construct_stochastic_map(const WignerVector &p, const WignerVector &q) {
    return StochasticWignerMatrix{construct_column_stochastic(p.values, q.values), p.dims, q.dims};
}

inline TransformPlan plan_transform(const Operator &rho, const Operator &sigma) {
    TransformPlan plan;
    plan.mana_source = mana(rho);
    plan.mana_target = mana(sigma);
    plan.feasible = plan.mana_source >= plan.mana_target - kManaTolerance;
    if (plan.feasible) {
        plan.stochastic_map = construct_stochastic_map(wigner_of_operator(rho), wigner_of_operator(sigma));
    }
    return plan;
}

/// Asymptotic exact conversion rate: copies of sigma obtained per copy of
/// rho, mana(rho) / mana(sigma). Returns +inf when the target is free.
inline double asymptotic_rate(const Operator &rho, const Operator &sigma) {
    double m_rho = mana(rho);
    double m_sigma = mana(sigma);
    if (m_sigma <= kManaTolerance) {
        return std::numeric_limits<double>::infinity();
    }
    if (m_rho <= kManaTolerance) {
        throw std::domain_error("rate undefined: source has zero mana but target does not");
    }
    return m_rho / m_sigma;
}

}  // namespace wigmagic
