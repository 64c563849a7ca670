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

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wigmagic/cli.hpp"

namespace {

using wigmagic::cli::StateRef;

void add_state_modifiers(CLI::App *cmd, int &copies, int &dim) {
    cmd->add_option("--copies", copies, "Tensor power of each state")->check(CLI::PositiveNumber);
    cmd->add_option("--dim", dim, "Local dimension for basis_k and maximally_mixed")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Discrete Wigner functions, mana and magic-state conversion tools for odd-dimensional qudits"};
    app.require_subcommand(1);

    std::string state, from, to, emit, out_path, w_path;
    int copies = 1, dim = 3, jobs = 1, steps = 51;
    double eps = 0.0, start = 0.0, end = 0.5, nu = 0.0, delta = 0.05;
    bool strict = false, no_timing = false;

    auto *mana = app.add_subcommand("mana", "Print the mana (base 2) of a state");
    mana->add_option("--state", state, "State name or state file")->required();
    add_state_modifiers(mana, copies, dim);

    auto *wigner = app.add_subcommand("wigner", "Print the Wigner function as a grid");
    wigner->add_option("--state", state, "State name or state file")->required();
    add_state_modifiers(wigner, copies, dim);

    auto *feasible = app.add_subcommand("feasible", "Decide exact conversion by quasi-operations");
    feasible->add_option("--from", from, "Source state")->required();
    feasible->add_option("--to", to, "Target state")->required();
    feasible->add_option("--emit", emit, "Write the stochastic Wigner matrix as CSV");
    add_state_modifiers(feasible, copies, dim);

    auto *nu_cmd = app.add_subcommand("nu", "Physical implementability of a conversion");
    nu_cmd->add_option("--from", from, "Source state")->required();
    nu_cmd->add_option("--to", to, "Target state")->required();
    nu_cmd->add_option("--eps", eps, "Operator-norm error")->check(CLI::NonNegativeNumber);
    nu_cmd->add_flag("--strict", strict, "Exit with status 3 when infeasible");
    add_state_modifiers(nu_cmd, copies, dim);

    auto *sweep = app.add_subcommand("sweep", "Implementability over a uniform error grid, as CSV");
    sweep->add_option("--from", from, "Source state")->required();
    sweep->add_option("--to", to, "Target state")->required();
    sweep->add_option("--start", start, "First error value")->check(CLI::NonNegativeNumber);
    sweep->add_option("--end", end, "Last error value")->check(CLI::NonNegativeNumber);
    sweep->add_option("--steps", steps, "Number of grid points")->check(CLI::Range(2, 100000));
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 256));
    sweep->add_option("--out", out_path, "Output CSV path (default stdout)");
    sweep->add_flag("--no-timing", no_timing, "Write 0 in the solve_time_ms column");
    add_state_modifiers(sweep, copies, dim);

    auto *cost = app.add_subcommand("sample-cost", "Hoeffding sample count for quasi-probability sampling");
    cost->add_option("--nu", nu, "Physical implementability")->required();
    cost->add_option("--eps", eps, "Estimation error")->required();
    cost->add_option("--delta", delta, "Failure probability");

    auto *verify = app.add_subcommand("verify-w", "Check an emitted stochastic Wigner matrix");
    verify->add_option("--w", w_path, "CSV written by feasible --emit")->required();
    verify->add_option("--from", from, "Source state")->required();
    verify->add_option("--to", to, "Target state")->required();
    add_state_modifiers(verify, copies, dim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return wigmagic::cli::kExitUsage;
    }

    namespace cli = wigmagic::cli;
    StateRef s{state, copies, dim}, f{from, copies, dim}, t{to, copies, dim};
    try {
        if (*mana) return cli::cmd_mana(s, std::cout);
        if (*wigner) return cli::cmd_wigner(s, std::cout);
        if (*feasible) return cli::cmd_feasible(f, t, emit, std::cout);
        if (*nu_cmd) return cli::cmd_nu(f, t, eps, strict, std::cout, std::cerr);
        if (*sweep) {
            cli::SweepOptions opt;
            opt.start = start;
            opt.end = end;
            opt.steps = steps;
            opt.jobs = jobs;
            opt.timing = !no_timing;
            return cli::cmd_sweep(f, t, opt, out_path, std::cout, std::cerr);
        }
        if (*cost) return cli::cmd_sample_cost(nu, eps, delta, std::cout);
        if (*verify) return cli::cmd_verify_w(w_path, f, t, std::cout);
    } catch (const wigmagic::SolverError &e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return cli::kExitSolverError;
    } catch (const std::runtime_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitSolverError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
    return cli::kExitUsage;
}
