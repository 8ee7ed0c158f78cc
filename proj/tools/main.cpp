#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "fractal_zeta/quadrature.hpp"
#include "fractal_zeta/set_spec.hpp"
#include "fractal_zeta/sets.hpp"

namespace {

void add_common(CLI::App* app, fzcli::Common& c, bool needs_set = true) {
    if (needs_set) app->add_option("--set", c.set, "Spec file path or inline spec")->required();
    app->add_option("--format", c.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    app->add_option("--output", c.output, "Write to this file instead of stdout");
    app->add_option("--delta", c.delta, "Neighborhood radius; default depends on the family");
    app->add_option("--seed", c.seed, "Seed for Monte Carlo sampling");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance and tube zeta functions of fractal sets"};
    app.require_subcommand(1);
    app.allow_windows_style_options(false);

    fzcli::Common common;
    fzcli::TubeArgs tube;
    fzcli::ZetaArgs zeta;
    fzcli::DimsArgs dims;
    fzcli::CheckArgs check;
    fzcli::QuasiArgs quasi;

    auto* set_cmd = app.add_subcommand("set", "Describe a set");
    add_common(set_cmd, common);

    auto* tube_cmd = app.add_subcommand("tube", "Tabulate the tube function");
    auto* tube_export = tube_cmd->add_subcommand("export", "Plot data (t, |A_t|) and (tau, G(tau))");
    tube_cmd->require_subcommand(0, 1);
    add_common(tube_cmd, common, false);
    tube_cmd->add_option("--set", common.set, "Spec file path or inline spec");
    add_common(tube_export, common);
    for (auto* cmd : {tube_cmd, tube_export}) {
        cmd->add_option("--t-min", tube.t_min);
        cmd->add_option("--t-max", tube.t_max);
        cmd->add_option("--samples", tube.samples);
        cmd->add_option("--method", tube.method, "auto, sliced or gap-formula");
    }
    tube_cmd->add_option("--monte-carlo", tube.monte_carlo, "Random points per t for a sampled cross-check");

    auto* zeta_cmd = app.add_subcommand("zeta", "Evaluate zeta functions");
    zeta_cmd->require_subcommand(1);
    auto* zeta_eval = zeta_cmd->add_subcommand("eval", "Evaluate on a grid of s");
    add_common(zeta_eval, common);
    zeta_eval->add_option("--re", zeta.re, "a:b:n");
    zeta_eval->add_option("--im", zeta.im, "a:b:n");
    zeta_eval->add_option("--kind", zeta.kind, "distance or tube");
    zeta_eval->add_option("--method", zeta.method, "numeric, direct or closed-form");

    auto* dims_cmd = app.add_subcommand("dims", "Complex dimensions");
    dims_cmd->require_subcommand(1);
    auto* dims_table = dims_cmd->add_subcommand("table", "Pole table with residues");
    add_common(dims_table, common);
    dims_table->add_option("--im-max", dims.im_max);

    auto* check_cmd = app.add_subcommand("check", "Run a check suite");
    add_common(check_cmd, common, false);
    check_cmd->add_option("--set", common.set, "Spec file path or inline spec");
    check_cmd->add_option("--suite", check.suite, "functional-eq, scaling, residue-content, closed-form, quasi or dti")
        ->required();
    check_cmd->add_option("--moduli", check.moduli, "quasi suite: comma separated moduli");
    check_cmd->add_option("--D", check.D, "quasi suite: common dimension");

    auto* quasi_cmd = app.add_subcommand("quasi", "Quasiperiodic unions of Cantor sets");
    quasi_cmd->require_subcommand(1);
    for (const char* action : {"build", "spectrum", "recover"}) {
        auto* sub = quasi_cmd->add_subcommand(action);
        add_common(sub, common, false);
        sub->add_option("--D", quasi.D)->required();
        sub->add_option("--moduli", quasi.moduli)->required();
        sub->add_option("--samples", quasi.samples);
        sub->add_option("--span-factor", quasi.span_factor, "Span in multiples of the longest period");
        sub->add_option("--window", quasi.window, "hann, flat-top or rectangular");
        sub->add_option("--f-max", quasi.f_max);
        sub->callback([&quasi, action] { quasi.action = action; });
    }

    auto* report_cmd = app.add_subcommand("report", "Full report for a set");
    add_common(report_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? fzcli::kOk : fzcli::kUsage;
    }

    try {
        if (set_cmd->parsed()) return fzcli::cmd_set(common);
        if (tube_export->parsed()) return fzcli::cmd_tube_export(common, tube);
        if (tube_cmd->parsed()) return fzcli::cmd_tube(common, tube);
        if (zeta_eval->parsed()) return fzcli::cmd_zeta(common, zeta);
        if (dims_table->parsed()) return fzcli::cmd_dims(common, dims);
        if (check_cmd->parsed()) return fzcli::cmd_check(common, check);
        if (quasi_cmd->parsed()) return fzcli::cmd_quasi(common, quasi);
        if (report_cmd->parsed()) return fzcli::cmd_report(common);
    } catch (const fzeta::ParseError& e) {
        std::cerr << "error: ";
        if (e.line() > 0) std::cerr << "line " << e.line() << ", column " << e.column() << ": ";
        std::cerr << e.what() << "\n";
        return fzcli::kUsage;
    } catch (const fzeta::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fzcli::kNonConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fzcli::kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fzcli::kNonConvergence;
    }
    return fzcli::kUsage;
}
