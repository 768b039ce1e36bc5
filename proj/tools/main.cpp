// treebound: contraction-rate bounds and simulations for consensus dynamics
// with a guaranteed spanning-tree structure.
//
// Subcommands:
//   bound     evaluate the rate bound for one parameter point
//   simulate  run the time-varying dynamics and check it against the bound
//   sweep     tabulate bound/classical-bound comparisons over a grid (CSV)
//   depths    agent depths and nested sets induced by a shapes file
//
// Exit codes: 0 success, 2 usage or validation error, 3 invariant-check failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treebound/dynamics.hpp"
#include "treebound/format.hpp"
#include "treebound/params.hpp"
#include "treebound/spectral.hpp"
#include "treebound/sweep.hpp"
#include "treebound/topology.hpp"

namespace {

using namespace treebound;

constexpr int kExitValidation = 2;
constexpr int kExitInvariant = 3;

// min:max:step, or a single value for a one-point range.
GridRange parse_range(const std::string& text) {
    GridRange r;
    const auto first = text.find(':');
    if (first == std::string::npos) {
        r.min = r.max = std::stod(text);
        r.step = 1.0;
        return r;
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos) {
        throw std::invalid_argument("range '" + text + "': expected min:max:step or a single value");
    }
    r.min = std::stod(text.substr(0, first));
    r.max = std::stod(text.substr(first + 1, second - first - 1));
    r.step = std::stod(text.substr(second + 1));
    return r;
}

TreeShape chain_shape(int n) {
    TreeShape s;
    s.fathers.resize(static_cast<std::size_t>(n));
    s.fathers[0] = -1;
    for (int i = 1; i < n; ++i) s.fathers[static_cast<std::size_t>(i)] = i - 1;
    return s;
}

NestedSets nested_from_file(const std::string& path) {
    const std::vector<TreeShape> shapes = parse_shapes_file(path);
    return nested_sets(sequence_depths(shapes));
}

struct BoundArgs {
    int depth = 1;
    std::optional<double> alpha_star, beta_star;
    std::optional<double> alpha, beta, gamma;
};

StarParams resolve_star(const BoundArgs& a) {
    const bool has_star = a.alpha_star || a.beta_star;
    const bool has_raw = a.alpha || a.beta || a.gamma;
    if (has_star && has_raw) {
        throw std::invalid_argument(
            "give either --alpha-star/--beta-star or --alpha/--beta/--gamma, not both");
    }
    if (has_raw) {
        if (!(a.alpha && a.beta && a.gamma)) {
            throw std::invalid_argument("raw parameters need all of --alpha, --beta, --gamma");
        }
        return star_params(checked_tree_params(*a.alpha, *a.beta, *a.gamma));
    }
    if (!a.alpha_star) {
        throw std::invalid_argument("give --alpha-star (plus optional --beta-star) or raw parameters");
    }
    return checked_star_params(*a.alpha_star, a.beta_star.value_or(0.0));
}

int cmd_bound(const BoundArgs& args) {
    const StarParams sp = resolve_star(args);
    const BoundReport report = rho_bound(args.depth, sp);
    const double classical = classical_bound(args.depth, sp.alpha_star);
    std::string ratio = "nan";
    if (sp.alpha_star > 0.0) {
        ratio = format_double(spectral_gap_ratio(args.depth, sp, sp.alpha_star));
    }
    std::cout << "depth        " << report.depth << '\n'
              << "alpha_star   " << format_double(sp.alpha_star) << '\n'
              << "beta_star    " << format_double(sp.beta_star) << '\n'
              << "rho          " << format_double(report.rho) << '\n'
              << "method       " << to_string(report.method) << '\n'
              << "iterations   " << report.iterations << '\n'
              << "residual     " << format_double(report.residual) << '\n'
              << "classical    " << format_double(classical) << '\n'
              << "gap_ratio    " << ratio << '\n';
    return 0;
}

struct SimulateArgs {
    std::string shapes_path;
    std::string extremal;
    int agents = 0;
    std::optional<double> alpha, beta, gamma;
    int horizon = 300;
    std::uint64_t seed = 0;
    std::string mode = "tight";
    std::optional<int> burn_in;
    std::string init = "split";
    std::string out_path;
};

int cmd_simulate(const SimulateArgs& args) {
    if (args.shapes_path.empty() == args.extremal.empty()) {
        throw std::invalid_argument("give exactly one of --shapes or --extremal");
    }
    if (args.horizon < 1) {
        throw std::invalid_argument("--horizon must be >= 1");
    }
    const int burn_in = args.burn_in.value_or(args.horizon / 10);

    NestedSets ns;
    TreeParams params;
    Trajectory traj;
    if (!args.shapes_path.empty()) {
        ns = nested_from_file(args.shapes_path);
        if (!(args.alpha && args.beta && args.gamma)) {
            throw std::invalid_argument("--shapes runs need --alpha, --beta, --gamma");
        }
        params = checked_tree_params(*args.alpha, *args.beta, *args.gamma);

        SimulationConfig cfg;
        cfg.nested = ns;
        cfg.params = params;
        cfg.horizon = args.horizon;
        cfg.seed = args.seed;
        if (args.mode == "tight") {
            cfg.mode = MatrixMode::Tight;
        } else if (args.mode == "slack") {
            cfg.mode = MatrixMode::Slack;
        } else {
            throw std::invalid_argument("--mode must be tight or slack");
        }
        if (args.init == "split") {
            cfg.initial = InitialCondition::WorstCaseSplit;
        } else if (args.init == "random") {
            cfg.initial = InitialCondition::RandomUniform;
        } else {
            throw std::invalid_argument("--init must be split or random");
        }
        traj = run_simulation(cfg);
    } else {
        if (args.agents < 2) {
            throw std::invalid_argument("--extremal runs need --agents >= 2");
        }
        ExtremalKind kind;
        if (args.extremal == "cycle") {
            kind = ExtremalKind::Cycle;
            params = TreeParams{0.0, 0.0, 1.0};
        } else if (args.extremal == "identity") {
            kind = ExtremalKind::Identity;
            params = TreeParams{1.0, 1.0, 0.0};
        } else if (args.extremal == "leader-chain") {
            kind = ExtremalKind::LeaderChain;
            if (!args.beta) {
                throw std::invalid_argument("--extremal leader-chain needs --beta");
            }
            params = checked_tree_params(1.0, *args.beta, 1.0 - *args.beta);
        } else {
            throw std::invalid_argument("--extremal must be cycle, identity or leader-chain");
        }
        const DenseMatrix a = extremal_system(kind, args.agents, args.beta.value_or(0.0));
        const TreeShape chain = chain_shape(args.agents);
        ns = nested_sets(sequence_depths({&chain, 1}));

        std::vector<double> x0(static_cast<std::size_t>(args.agents), 1.0);
        if (args.init == "split") {
            x0[0] = 0.0;
        } else if (args.init == "random") {
            SplitMix64 rng(args.seed);
            for (double& v : x0) v = rng.next_unit();
        } else {
            throw std::invalid_argument("--init must be split or random");
        }
        traj = run_stationary(a, ns, x0, args.horizon);
    }

    const StarParams sp = star_params(params);
    const BoundReport bound = rho_bound(ns.depth(), sp);
    const double rate = empirical_rate(traj, burn_in);
    const DenseMatrix comparison = build_comparison_matrix(ns.depth(), sp);
    const std::optional<int> violation = first_comparison_violation(traj, comparison);
    const bool dominance_ok = rate <= bound.rho + 5e-3;

    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path);
        if (!out) {
            throw std::invalid_argument("cannot open output file " + args.out_path);
        }
        write_trajectory_csv(out, traj, rate);
    }

    std::cout << "agents       " << ns.agents() << '\n'
              << "depth        " << ns.depth() << '\n'
              << "alpha_star   " << format_double(sp.alpha_star) << '\n'
              << "beta_star    " << format_double(sp.beta_star) << '\n'
              << "rho_bound    " << format_double(bound.rho) << '\n'
              << "empirical    " << format_double(rate) << '\n'
              << "dominance    " << (dominance_ok ? "PASS" : "FAIL") << '\n'
              << "comparison   ";
    if (violation) {
        std::cout << "FAIL (step " << *violation << ")\n";
    } else {
        std::cout << "PASS\n";
    }
    return (dominance_ok && !violation) ? 0 : kExitInvariant;
}

struct SweepArgs {
    std::vector<int> depths;
    std::optional<std::string> alpha_star, beta_star;
    std::optional<std::string> alpha, beta, gamma;
    std::string out_path;
};

int cmd_sweep(const SweepArgs& args) {
    SweepSpec spec;
    spec.depths = args.depths;
    const bool has_star = args.alpha_star || args.beta_star;
    const bool has_raw = args.alpha || args.beta || args.gamma;
    if (has_star == has_raw) {
        throw std::invalid_argument(
            "give either --alpha-star/--beta-star ranges or --alpha/--beta/--gamma ranges");
    }
    if (has_star) {
        if (!args.alpha_star || !args.beta_star) {
            throw std::invalid_argument("star sweeps need both --alpha-star and --beta-star");
        }
        spec.raw = false;
        spec.alpha_star = parse_range(*args.alpha_star);
        spec.beta_star = parse_range(*args.beta_star);
    } else {
        if (!args.alpha || !args.beta || !args.gamma) {
            throw std::invalid_argument("raw sweeps need --alpha, --beta and --gamma");
        }
        spec.raw = true;
        spec.alpha = parse_range(*args.alpha);
        spec.beta = parse_range(*args.beta);
        spec.gamma = parse_range(*args.gamma);
    }

    if (args.out_path.empty() || args.out_path == "-") {
        run_sweep(spec, std::cout);
    } else {
        std::ofstream out(args.out_path);
        if (!out) {
            throw std::invalid_argument("cannot open output file " + args.out_path);
        }
        run_sweep(spec, out);
    }
    return 0;
}

int cmd_depths(const std::string& shapes_path) {
    const std::vector<TreeShape> shapes = parse_shapes_file(shapes_path);
    const DepthProfile dp = sequence_depths(shapes);
    const NestedSets ns = nested_sets(dp);

    std::cout << "agents  " << dp.agents() << '\n';
    std::cout << "r       [";
    for (int i = 0; i < dp.agents(); ++i) {
        if (i > 0) std::cout << ", ";
        std::cout << dp.depths[static_cast<std::size_t>(i)];
    }
    std::cout << "]\n";
    std::cout << "depth   " << dp.depth() << '\n';
    for (std::size_t k = 0; k < ns.members.size(); ++k) {
        std::cout << "N_" << k << "     {";
        for (std::size_t j = 0; j < ns.members[k].size(); ++j) {
            if (j > 0) std::cout << ", ";
            std::cout << ns.members[k][j] + 1;
        }
        std::cout << "}\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contraction-rate bounds for spanning-tree consensus dynamics"};
    app.require_subcommand(1);

    BoundArgs bound_args;
    CLI::App* bound = app.add_subcommand("bound", "evaluate the rate bound");
    bound->add_option("--depth", bound_args.depth, "tree depth T")->required();
    bound->add_option("--alpha-star", bound_args.alpha_star, "reduced alpha");
    bound->add_option("--beta-star", bound_args.beta_star, "reduced beta");
    bound->add_option("--alpha", bound_args.alpha, "root self-weight bound");
    bound->add_option("--beta", bound_args.beta, "same-depth weight bound");
    bound->add_option("--gamma", bound_args.gamma, "upstream weight bound");

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "run the dynamics against the bound");
    sim->add_option("--shapes", sim_args.shapes_path, "shapes file (recurring tree shapes)");
    sim->add_option("--extremal", sim_args.extremal, "stationary witness: cycle, identity, leader-chain");
    sim->add_option("--agents", sim_args.agents, "agent count for --extremal runs");
    sim->add_option("--alpha", sim_args.alpha, "root self-weight bound");
    sim->add_option("--beta", sim_args.beta, "same-depth weight bound");
    sim->add_option("--gamma", sim_args.gamma, "upstream weight bound");
    sim->add_option("--horizon", sim_args.horizon, "number of steps")->default_val(300);
    sim->add_option("--seed", sim_args.seed, "RNG seed")->default_val(0);
    sim->add_option("--mode", sim_args.mode, "tight or slack")->default_val("tight");
    sim->add_option("--burn-in", sim_args.burn_in, "steps dropped before the rate fit (default horizon/10)");
    sim->add_option("--init", sim_args.init, "initial condition: split or random")->default_val("split");
    sim->add_option("--out", sim_args.out_path, "trajectory CSV path");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "tabulate the bound over a grid (CSV)");
    sweep->add_option("--depth", sweep_args.depths, "depth values")->required()->delimiter(',');
    sweep->add_option("--alpha-star", sweep_args.alpha_star, "range min:max:step or value");
    sweep->add_option("--beta-star", sweep_args.beta_star, "range min:max:step or value");
    sweep->add_option("--alpha", sweep_args.alpha, "range min:max:step or value");
    sweep->add_option("--beta", sweep_args.beta, "range min:max:step or value");
    sweep->add_option("--gamma", sweep_args.gamma, "range min:max:step or value");
    sweep->add_option("--out", sweep_args.out_path, "CSV path (default stdout)");

    std::string depths_path;
    CLI::App* depths = app.add_subcommand("depths", "agent depths and nested sets of a shapes file");
    depths->add_option("--shapes", depths_path, "shapes file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (bound->parsed()) return cmd_bound(bound_args);
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (depths->parsed()) return cmd_depths(depths_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
