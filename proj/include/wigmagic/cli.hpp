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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wigmagic/implementability.hpp"
#include "wigmagic/lp_oracle.hpp"
#include "wigmagic/states.hpp"
#include "wigmagic/transform.hpp"

namespace wigmagic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSolverError = 4;

/// Tolerance used by verify-w for column sums and W p = q.
inline constexpr double kVerifyTolerance = 1e-9;

/// A named state or a path to a state file, with tensor-power and local
/// dimension modifiers.
struct StateRef {
    std::string ref;
    int copies = 1;
    int dim = 3;
};

inline Operator resolve_state(const StateRef &s) {
    if (s.copies < 1) {
        throw std::invalid_argument("--copies must be >= 1");
    }
    if (is_named_state(s.ref)) {
        return named_state(s.ref, s.copies, s.dim);
    }
    if (!std::filesystem::exists(s.ref)) {
        throw std::invalid_argument("'" + s.ref + "' is neither a known state name nor an existing file");
    }
    Operator one = read_state_file(s.ref);
    Operator out = one;
    for (int c = 1; c < s.copies; c++) out = out.tensor(one);
    return out;
}

namespace detail {

inline std::string fixed(double x, int digits) {
    // Values that round to zero print without a sign.
    if (std::abs(x) < 0.5 * std::pow(10.0, -digits)) x = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
    return buf;
}

inline std::string sig9(double x) {
    if (x == 0.0) x = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

}  // namespace detail

/// Writes W as CSV: a `# W rows x cols` header then one row per line.
inline void write_stochastic_csv(std::ostream &out, const Eigen::MatrixXd &W) {
    out << "# W " << W.rows() << " x " << W.cols() << '\n';
    for (Eigen::Index r = 0; r < W.rows(); r++) {
        for (Eigen::Index c = 0; c < W.cols(); c++) {
            if (c) out << ',';
            out << wigmagic::detail::format_double(W(r, c));
        }
        out << '\n';
    }
}

inline Eigen::MatrixXd read_stochastic_csv(std::istream &in) {
    std::string line;
    std::optional<std::pair<long, long>> shape;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] == '#') {
            long r = 0, c = 0;
            char tag = 0;
            if (std::sscanf(line.c_str(), "# %c %ld x %ld", &tag, &r, &c) == 3 && tag == 'W') {
                shape = {r, c};
            }
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = std::stod(cell, &used);
            if (cell.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument("bad number '" + cell + "' in W file");
            }
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("W file rows have different lengths");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("W file has no rows");
    Eigen::MatrixXd W(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); r++) {
        for (std::size_t c = 0; c < rows[r].size(); c++) {
            W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    if (shape && (shape->first != W.rows() || shape->second != W.cols())) {
        throw std::invalid_argument("W header shape does not match the data");
    }
    return W;
}

inline int cmd_mana(const StateRef &state, std::ostream &out) {
    out << detail::fixed(mana(resolve_state(state)), 9) << '\n';
    return kExitOk;
}

/// Prints the Wigner function as a grid: rows are first phase-space
/// coordinates, columns second coordinates, both in mixed radix over the
/// subsystems.
inline int cmd_wigner(const StateRef &state, std::ostream &out) {
    Operator rho = resolve_state(state);
    WignerVector w = wigner_of_operator(rho);
    const auto &dims = rho.dims.dims();
    const int D = rho.dims.total();
    for (int row = 0; row < D; row++) {
        for (int col = 0; col < D; col++) {
            PhasePoint pt;
            int r = row, c = col;
            pt.coords.resize(dims.size());
            for (std::size_t k = dims.size(); k-- > 0;) {
                pt.coords[k] = {r % dims[k], c % dims[k]};
                r /= dims[k];
                c /= dims[k];
            }
            if (col) out << ' ';
            double v = w.values(static_cast<Eigen::Index>(point_index(rho.dims, pt)));
            std::string s = detail::fixed(v, 9);
            if (s[0] != '-') s = " " + s;
            out << s;
        }
        out << '\n';
    }
    return kExitOk;
}

inline int cmd_feasible(const StateRef &from, const StateRef &to, const std::string &emit, std::ostream &out) {
    Operator rho = resolve_state(from);
    Operator sigma = resolve_state(to);
    TransformPlan plan = plan_transform(rho, sigma);
    out << (plan.feasible ? "YES" : "NO") << '\n';
    out << "mana_from " << detail::fixed(plan.mana_source, 9) << '\n';
    out << "mana_to " << detail::fixed(plan.mana_target, 9) << '\n';
    if (plan.feasible && !emit.empty()) {
        std::ofstream file(emit);
        if (!file) throw std::invalid_argument("cannot write '" + emit + "'");
        write_stochastic_csv(file, plan.stochastic_map->values);
        if (!file) throw std::invalid_argument("failed writing '" + emit + "'");
    }
    return kExitOk;
}

inline int cmd_nu(const StateRef &from, const StateRef &to, double eps, bool strict, std::ostream &out,
                  std::ostream &err) {
    if (!(eps >= 0)) throw std::invalid_argument("--eps must be >= 0");
    auto r = physical_implementability(resolve_state(from), resolve_state(to), eps);
    switch (r.status) {
        case SdpStatus::optimal:
            out << detail::fixed(r.nu, 6) << '\n';
            return kExitOk;
        case SdpStatus::infeasible:
            out << "INFEASIBLE\n";
            return strict ? kExitInfeasible : kExitOk;
        default:
            err << "solver error: " << r.message << '\n';
            return kExitSolverError;
    }
}

struct SweepOptions {
    double start = 0.0;
    double end = 0.5;
    int steps = 51;
    int jobs = 1;
    bool timing = true;
    double threshold_tol = 1e-4;
};

struct SweepRow {
    double eps = 0;
    SdpStatus status = SdpStatus::solver_error;
    double nu = 0;
    double solve_time_ms = 0;
};

inline std::vector<SweepRow> run_sweep(const Operator &rho, const Operator &sigma, const SweepOptions &opt) {
    if (!(opt.start >= 0) || !(opt.end > opt.start)) {
        throw std::invalid_argument("sweep range must satisfy 0 <= start < end");
    }
    if (opt.steps < 2) throw std::invalid_argument("--steps must be >= 2");
    if (opt.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
    std::vector<SweepRow> rows(static_cast<std::size_t>(opt.steps));
    for (int k = 0; k < opt.steps; k++) {
        rows[static_cast<std::size_t>(k)].eps =
            k == opt.steps - 1 ? opt.end : opt.start + (opt.end - opt.start) * k / (opt.steps - 1);
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            auto t0 = std::chrono::steady_clock::now();
            SweepRow &row = rows[i];
            try {
                auto r = physical_implementability(rho, sigma, row.eps);
                row.status = r.status;
                row.nu = r.nu;
            } catch (const std::exception &) {
                row.status = SdpStatus::solver_error;
            }
            row.solve_time_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    int nthreads = std::min<int>(opt.jobs, opt.steps);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; t++) pool.emplace_back(worker);
    worker();
    for (auto &th : pool) th.join();
    return rows;
}

inline void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows, std::optional<double> threshold,
                            bool timing, double threshold_tol) {
    if (threshold) {
        out << "# feasibility_threshold=" << detail::sig9(*threshold) << " (bisection tol "
            << detail::sig9(threshold_tol) << ")\n";
    }
    out << "eps,nu,status,solve_time_ms\n";
    for (const auto &row : rows) {
        out << detail::sig9(row.eps) << ',';
        switch (row.status) {
            case SdpStatus::optimal:
                out << detail::sig9(std::abs(row.nu) < 5e-10 ? 0.0 : row.nu);
                break;
            case SdpStatus::infeasible:
                out << "INFEASIBLE";
                break;
            default:
                out << "nan";
                break;
        }
        char ms[32];
        std::snprintf(ms, sizeof(ms), "%.3f", timing ? row.solve_time_ms : 0.0);
        out << ',' << to_string(row.status) << ',' << ms << '\n';
    }
}

/// Locates the feasibility boundary between the last infeasible grid point
/// and the next feasible one.
inline std::optional<double> sweep_threshold(const Operator &rho, const Operator &sigma,
                                             const std::vector<SweepRow> &rows, double tol) {
    std::optional<double> lo, hi;
    for (const auto &row : rows) {
        if (row.status == SdpStatus::infeasible) {
            lo = row.eps;
            hi.reset();
        } else if (row.status == SdpStatus::optimal && lo && !hi) {
            hi = row.eps;
        }
    }
    if (!lo) return std::nullopt;
    // The completely depolarizing channel reaches any target within eps = 1.
    double upper = hi ? *hi : std::max(1.0, 2.0 * *lo);
    return bisect_feasibility_threshold(rho, sigma, *lo, upper, tol);
}

inline int cmd_sweep(const StateRef &from, const StateRef &to, const SweepOptions &opt, const std::string &out_path,
                     std::ostream &out, std::ostream &err) {
    Operator rho = resolve_state(from);
    Operator sigma = resolve_state(to);
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            err << "cannot write '" << out_path << "'\n";
            return kExitUsage;
        }
    }
    auto rows = run_sweep(rho, sigma, opt);
    std::optional<double> threshold;
    try {
        threshold = sweep_threshold(rho, sigma, rows, opt.threshold_tol);
    } catch (const std::exception &e) {
        err << "threshold bisection failed: " << e.what() << '\n';
    }
    std::ostream &dest = out_path.empty() ? out : static_cast<std::ostream &>(file);
    write_sweep_csv(dest, rows, threshold, opt.timing, opt.threshold_tol);
    dest.flush();
    if (!dest) {
        err << "failed writing sweep output\n";
        return kExitUsage;
    }
    bool any_error = std::any_of(rows.begin(), rows.end(),
                                 [](const SweepRow &r) { return r.status == SdpStatus::solver_error; });
    if (any_error) {
        err << "warning: some sweep points ended in solver errors\n";
    }
    return kExitOk;
}

inline int cmd_sample_cost(double nu, double eps, double delta, std::ostream &out) {
    out << sampling_cost(nu, eps, delta) << '\n';
    return kExitOk;
}

/// Checks a W file against a state pair: nonnegative entries, unit column
/// sums and W p = q.
inline int cmd_verify_w(const std::string &path, const StateRef &from, const StateRef &to, std::ostream &out) {
    std::ifstream file(path);
    if (!file) throw std::invalid_argument("cannot open '" + path + "'");
    Eigen::MatrixXd W = read_stochastic_csv(file);
    WignerVector p = wigner_of_operator(resolve_state(from));
    WignerVector q = wigner_of_operator(resolve_state(to));
    std::vector<std::string> problems;
    if (W.cols() != p.values.size() || W.rows() != q.values.size()) {
        out << "FAIL: W is " << W.rows() << " x " << W.cols() << ", expected " << q.values.size() << " x "
            << p.values.size() << '\n';
        return kExitFailure;
    }
    double min_entry = W.minCoeff();
    double col_err = (W.colwise().sum().array() - 1.0).abs().maxCoeff();
    double map_err = (W * p.values - q.values).cwiseAbs().maxCoeff();
    if (min_entry < -kVerifyTolerance) problems.push_back("negative entry " + detail::sig9(min_entry));
    if (col_err > kVerifyTolerance) problems.push_back("column sum error " + detail::sig9(col_err));
    if (map_err > kVerifyTolerance) problems.push_back("|Wp - q|_inf = " + detail::sig9(map_err));
    if (problems.empty()) {
        out << "OK column_sum_error " << detail::sig9(col_err) << " map_error " << detail::sig9(map_err) << '\n';
        return kExitOk;
    }
    out << "FAIL";
    for (const auto &p_ : problems) out << ": " << p_;
    out << '\n';
    return kExitFailure;
}

}  // namespace wigmagic::cli
