#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csplab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"workbench for binary CSPs under structural parameters"};
    app.require_subcommand(1);

    csplab::SolveOptions so;
    CLI::App* solve = app.add_subcommand("solve", "decide one instance");
    solve->add_option("file", so.file, "instance file (.bcsp)")->required();
    solve->add_option("--method", so.method, "brute | dp | vc | modulator");
    solve->add_option("--tree", so.tree, "elimination forest witness (.tree)");
    solve->add_option("--cover", so.cover, "vertex set witness (.set)");
    solve->add_flag("--witness", so.witness, "print the satisfying assignment");

    csplab::ReduceOptions ro;
    CLI::App* reduce = app.add_subcommand("reduce", "apply a reduction rule to a file");
    reduce->add_option("--rule", ro.rule, "reduction rule name")->required();
    reduce->add_option("inputs", ro.inputs, "input files");
    reduce->add_option("--cover", ro.cover, "vertex set witness (.set)");
    reduce->add_option("--tree", ro.tree, "tree witness (.tree)");
    reduce->add_option("--out", ro.out, "output artifact path");

    csplab::CampaignConfig vc;
    CLI::App* verify = app.add_subcommand("verify", "run a seeded verification campaign");
    verify->add_option("--rule", vc.rule, "campaign rule name")->required();
    verify->add_option("--trials", vc.trials, "number of trials");
    verify->add_option("--seed", vc.seed, "campaign master seed");
    verify->add_option("--max-n", vc.max_n, "instance size cap");
    verify->add_option("--max-dom", vc.max_dom, "domain size cap");
    verify->add_option("--d", vc.d, "depth cap for structural witnesses");
    verify->add_option("--k", vc.k, "witness size cap");
    verify->add_option("--out", vc.out_dir, "directory for the per-trial status file");

    csplab::DecomposeOptions dopt;
    CLI::App* decompose = app.add_subcommand("decompose", "find a structural witness");
    decompose->add_option("file", dopt.file, "graph or instance file")->required();
    decompose
        ->add_option("--parameter", dopt.parameter, "td | vc | fvs | mod-td | dfold | fat-tree")
        ->required();
    decompose->add_option("--d", dopt.d, "depth bound");
    decompose->add_option("--k", dopt.k, "size bound");
    decompose->add_option("--out", dopt.out, "witness output path");

    csplab::GenOptions go;
    CLI::App* gen = app.add_subcommand("gen", "generate a seeded artifact");
    gen->add_option("--kind", go.kind, "bincsp | graph | wsat | listcoloring");
    gen->add_option("--seed", go.seed, "generator seed");
    gen->add_option("--max-n", go.max_n, "size cap");
    gen->add_option("--max-dom", go.max_dom, "domain or color cap");
    gen->add_option("--level", go.level, "formula level (wsat only)");
    gen->add_option("--out", go.out, "output path; stdout when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (solve->parsed()) return csplab::cmd_solve(so, std::cout, std::cerr);
    if (reduce->parsed()) return csplab::cmd_reduce(ro, std::cout, std::cerr);
    if (verify->parsed()) return csplab::cmd_verify(vc, std::cout, std::cerr);
    if (decompose->parsed()) return csplab::cmd_decompose(dopt, std::cout, std::cerr);
    if (gen->parsed()) return csplab::cmd_gen(go, std::cout, std::cerr);
    return 2;
}
