// Copyright 2026 The linclone Authors
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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_commands.hpp"

namespace {

using namespace linclone;
using namespace linclone::cli;

struct InputFlags {
    std::string coherent;
    double squeezed = 0.0;
    double phase = 0.0;
    double thermal = 0.0;
    std::string alpha = "0";
};

struct InputOptions {
    CLI::Option* coherent = nullptr;
    CLI::Option* squeezed = nullptr;
    CLI::Option* thermal = nullptr;
};

InputOptions add_input_flags(CLI::App* sub, InputFlags& f) {
    InputOptions o;
    o.coherent = sub->add_option("--coherent", f.coherent, "coherent input with amplitude alpha, e.g. 1+0.5i");
    o.squeezed = sub->add_option("--squeezed", f.squeezed, "squeezed input with squeezing modulus r")
                     ->check(CLI::NonNegativeNumber);
    o.thermal = sub->add_option("--thermal", f.thermal, "displaced thermal input with mean photon number N")
                    ->check(CLI::NonNegativeNumber);
    sub->add_option("--phase", f.phase, "squeezing phase (with --squeezed)");
    sub->add_option("--alpha", f.alpha, "displacement amplitude for --squeezed/--thermal");
    o.coherent->excludes(o.squeezed)->excludes(o.thermal);
    o.squeezed->excludes(o.thermal);
    return o;
}

InputSpec make_input_unchecked(const InputFlags& f, const InputOptions& o) {
    InputSpec in;
    in.alpha = parse_complex(f.alpha);
    if (o.coherent->count() > 0) {
        in.kind = InputSpec::Kind::Coherent;
        in.alpha = parse_complex(f.coherent);
    } else if (o.squeezed->count() > 0) {
        in.kind = InputSpec::Kind::Squeezed;
        in.xi_mod = f.squeezed;
        in.xi_phase = f.phase;
    } else if (o.thermal->count() > 0) {
        in.kind = InputSpec::Kind::Thermal;
        in.n_thermal = f.thermal;
    } else if (in.alpha != std::complex<double>(0.0, 0.0)) {
        in.kind = InputSpec::Kind::Coherent;
    }
    return in;
}

InputSpec make_input(const InputFlags& f, const InputOptions& o) {
    try {
        return make_input_unchecked(f, o);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

RadialWeight parse_radial(const std::string& s) {
    if (s == "prior") return RadialWeight::Prior;
    if (s == "printed") return RadialWeight::Printed;
    throw UsageError("unknown radial weight '" + s + "' (prior|printed)");
}

void add_timing(Json& report, std::chrono::steady_clock::time_point start) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["timing"] = Json{{"seconds", num(s)}};
}

int run(int argc, char** argv) {
    CLI::App app{"linclone-cli: Gaussian cloning machine with measurement and feed-forward"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file with default settings; command-line flags take precedence");

    // Machine settings, shared by every command.
    double tau1 = 0.5, tau2 = 0.5, g = 1.0, eta = 1.0;
    std::string prop = "physical";
    bool timing = false;
    app.add_option("--tau1", tau1, "first beam splitter transmissivity")->check(CLI::Range(0.0, 1.0));
    app.add_option("--tau2", tau2, "second beam splitter transmissivity")->check(CLI::Range(0.0, 1.0));
    CLI::Option* g_opt =
        app.add_option("--g", g, "feed-forward gain (default: unity-gain value for tau1)")->check(CLI::NonNegativeNumber);
    app.add_option("--eta", eta, "detector efficiency in (0, 1]");
    app.add_option("--prop", prop, "noise propagation rule")->check(CLI::IsMember({"physical", "paper"}));
    app.add_flag("--timing", timing, "add wall-clock timing to JSON reports");

    std::string out;
    auto machine = [&] {
        if (!(eta > 0.0 && eta <= 1.0)) throw UsageError("--eta must lie in (0, 1]");
        MachineSpec m;
        m.tau1 = tau1;
        m.tau2 = tau2;
        if (g_opt->count() > 0) m.g = g;
        m.eta = eta;
        m.mode = parse_prop(prop);
        return m;
    };

    // clone
    CLI::App* clone = app.add_subcommand("clone", "clone one Gaussian input and report moments and fidelities");
    clone->fallthrough();
    InputFlags clone_in;
    const InputOptions clone_opts = add_input_flags(clone, clone_in);
    clone->add_option("--out", out, "output file (default: stdout)");

    // sweep
    CLI::App* sweep = app.add_subcommand("sweep", "fidelity table over one parameter, one column per efficiency");
    sweep->fallthrough();
    std::string quantity;
    std::vector<double> range;
    std::vector<double> etas;
    bool both_modes = false;
    std::string radial = "prior";
    unsigned threads = 0;
    sweep->add_option("--quantity", quantity, "abscissa")
        ->required()
        ->check(CLI::IsMember({"tau1", "xi", "sigma_s", "N", "bigN", "mu_N"}));
    sweep->add_option("--range", range, "LO HI STEPS")->expected(3)->required();
    sweep->add_option("--etas", etas, "comma-separated efficiencies (default: --eta)")->delimiter(',');
    sweep->add_flag("--both-modes", both_modes, "emit physical and paper columns for every efficiency");
    sweep->add_option("--radial", radial, "squeezing-ensemble radial weight")->check(CLI::IsMember({"prior", "printed"}));
    sweep->add_option("--threads", threads, "worker threads (0: all cores)");
    sweep->add_option("--out", out, "CSV file (default: $LINCLONE_OUT_DIR/sweep_<quantity>.csv, else stdout)");

    // average
    CLI::App* average = app.add_subcommand("average", "clone fidelity averaged over an input ensemble");
    average->fallthrough();
    AverageSpec avg;
    average->add_option("--ensemble", avg.ensemble, "input ensemble")
        ->required()
        ->check(CLI::IsMember({"squeezing", "tophat", "halfgauss", "amplitude"}));
    average->add_option("--width", avg.width, "sigma_s, bigN, mu_N or sigma_a^2")->required();
    average->add_option("--radial", radial, "squeezing-ensemble radial weight")->check(CLI::IsMember({"prior", "printed"}));
    average->add_option("--out", out, "output file (default: stdout)");

    // optimize-gain
    CLI::App* optimize = app.add_subcommand("optimize-gain", "best gain for coherent inputs with a Gaussian prior");
    optimize->fallthrough();
    double sigma_a2 = 1.0;
    optimize->add_option("--sigma-a2", sigma_a2, "prior variance of the input amplitude")->required();
    optimize->add_option("--out", out, "output file (default: stdout)");

    // mc
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo over measurement records");
    mc->fallthrough();
    InputFlags mc_in;
    const InputOptions mc_opts = add_input_flags(mc, mc_in);
    McSpec mc_spec;
    mc->add_option("--n", mc_spec.n, "number of trajectories")->check(CLI::PositiveNumber);
    mc->add_option("--seed", mc_spec.seed, "random seed");
    mc->add_option("--threads", mc_spec.threads, "worker threads (0: all cores)");
    mc->add_option("--out", out, "output file (default: stdout)");

    // verify
    CLI::App* verify = app.add_subcommand("verify", "cross-check formulas against the number-basis simulator");
    verify->fallthrough();
    std::string level = "quick";
    verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--out", out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::FileError& e) {
        std::cerr << e.what() << "\n";
        return kIo;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (clone->parsed()) {
            Json r = cmd_clone(make_input(clone_in, clone_opts), machine());
            if (timing) add_timing(r, start);
            write_output(resolve_output(out), dump(r));
        } else if (sweep->parsed()) {
            SweepSpec spec;
            spec.quantity = parse_quantity(quantity);
            spec.lo = range[0];
            spec.hi = range[1];
            if (range[2] != std::floor(range[2]) || range[2] > 1e7) throw UsageError("sweep: STEPS must be an integer");
            spec.steps = static_cast<int>(range[2]);
            spec.machine = machine();
            spec.etas = etas.empty() ? std::vector<double>{spec.machine.eta} : etas;
            spec.both_modes = both_modes;
            spec.radial = parse_radial(radial);
            spec.threads = threads;
            spec.validate();
            std::string path = resolve_output(out);
            if (path.empty() && !default_out_dir().empty()) {
                path = default_out_dir() + "/sweep_" + quantity_name(spec.quantity) + ".csv";
            }
            write_output(path, cmd_sweep(spec));
        } else if (average->parsed()) {
            avg.radial = parse_radial(radial);
            Json r = cmd_average(avg, machine());
            if (timing) add_timing(r, start);
            write_output(resolve_output(out), dump(r));
        } else if (optimize->parsed()) {
            const MachineSpec m = machine();
            Json r = cmd_optimize_gain(sigma_a2, m.eta, m.mode);
            if (timing) add_timing(r, start);
            write_output(resolve_output(out), dump(r));
        } else if (mc->parsed()) {
            Json r = cmd_mc(make_input(mc_in, mc_opts), machine(), mc_spec);
            if (timing) add_timing(r, start);
            write_output(resolve_output(out), dump(r));
        } else if (verify->parsed()) {
            const std::vector<Check> checks = run_verification(level);
            Json r = verification_json(level, checks);
            if (timing) add_timing(r, start);
            for (const Check& c : checks) {
                std::fprintf(stderr, "%s %s value=%s target=%s tol=%s\n", c.pass() ? "PASS" : "FAIL", c.name.c_str(),
                             format_number(c.value).c_str(), format_number(c.target).c_str(),
                             format_number(c.tolerance).c_str());
            }
            write_output(resolve_output(out), dump(r));
            return r["passed"].get<bool>() ? kOk : kVerifyFailed;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPhysics;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
