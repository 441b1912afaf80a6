#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace nodeid::cli;

int main(int argc, char** argv) {
    CLI::App app{"Node identifiability experiments on random regular graphs"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Sample a random r-regular graph and write its edge list");
    gen_cmd->add_option("--n", gen.n, "node count")->required();
    gen_cmd->add_option("--r", gen.r, "degree");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed")->required();
    gen_cmd->add_option("--out", gen.out, "edge list path")->required();

    PeOptions pe;
    auto* pe_cmd = app.add_subcommand("pe", "Write the spectral positional encoding of a graph");
    pe_cmd->add_option("--graph", pe.graph, "edge list path")->required();
    pe_cmd->add_option("--M", pe.M, "eigenvector count");
    pe_cmd->add_option("--out", pe.out, "CSV path")->required();

    TreeKernelOptions tk;
    auto* tk_cmd = app.add_subcommand("treekernel", "Tabulate the tree heat kernel and its distance link");
    tk_cmd->add_option("--r", tk.r, "degree");
    tk_cmd->add_option("--t", tk.t, "diffusion time");
    tk_cmd->add_option("--d-max", tk.d_max, "largest distance");
    tk_cmd->add_option("--tail-eps", tk.tail_eps, "Poisson tail bound");
    tk_cmd->add_option("--out", tk.out, "CSV path")->required();

    SeparationOptions sep;
    auto* sep_cmd = app.add_subcommand("separation", "WL versus Laplacian identification sweep");
    sep_cmd->add_option("--config", sep.config, "key=value config file")->check(CLI::ExistingFile);
    sep_cmd->add_option("--seed", sep.seed, "overrides the config seed");
    sep_cmd->add_option("--threads", sep.threads, "worker threads");
    sep_cmd->add_option("--out", sep.out, "output directory")->required();

    InvarianceOptions inv;
    auto* inv_cmd = app.add_subcommand("invariance", "Check sign and basis invariance of the encoding");
    inv_cmd->add_option("--graph", inv.graph, "edge list path")->required();
    inv_cmd->add_option("--M", inv.M, "eigenvector count");
    inv_cmd->add_option("--trials", inv.trials, "random transforms per check");
    inv_cmd->add_option("--seed", inv.seed, "RNG seed")->required();
    inv_cmd->add_option("--out", inv.out, "CSV path")->required();

    InjectivityOptions inj;
    auto* inj_cmd = app.add_subcommand("injectivity", "Random-wave small-ball and separation experiments");
    inj_cmd->add_option("--config", inj.config, "key=value config file")->check(CLI::ExistingFile);
    inj_cmd->add_option("--seed", inj.seed, "overrides the config seed");
    inj_cmd->add_option("--threads", inj.threads, "worker threads");
    inj_cmd->add_option("--out", inj.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
        std::cerr << error_line(sub ? sub->get_name() : "nodeid", "usage", e.what()) << '\n';
        return kExitUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (*gen_cmd) return cmd_gen(gen, std::cerr);
        if (*pe_cmd) return cmd_pe(pe, std::cerr);
        if (*tk_cmd) return cmd_treekernel(tk, std::cerr);
        if (*sep_cmd) return cmd_separation(sep, std::cerr);
        if (*inv_cmd) return cmd_invariance(inv, std::cerr);
        if (*inj_cmd) return cmd_injectivity(inj, std::cerr);
    } catch (const CommandError& e) {
        std::cerr << error_line(name, e.code(), e.what(), e.key()) << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << error_line(name, "internal", e.what()) << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
