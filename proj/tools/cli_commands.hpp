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

#pragma once

// Command implementations behind linclone-cli. Each command turns validated
// options into a report (JSON) or a table (CSV); argument parsing and process
// exit codes live in main.cpp.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "linclone/linclone.hpp"

namespace linclone::cli {

using Json = nlohmann::ordered_json;

/// Exit codes.
enum Exit : int { kOk = 0, kUsage = 2, kPhysics = 3, kIo = 4, kVerifyFailed = 5 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid combination of otherwise well-formed flags.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting

/// Nine significant digits, '.' decimal separator regardless of locale.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    std::string s(buf);
    std::replace(s.begin(), s.end(), ',', '.');
    if (s == "-0") s = "0";
    return s;
}

/// JSON number rounded to nine significant digits (null if not finite).
inline Json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(format_number(v).c_str(), nullptr);
}

inline Json vec_json(const Vec2& v) { return Json::array({num(v(0)), num(v(1))}); }
inline Json mat_json(const Mat2& m) {
    return Json::array({Json::array({num(m(0, 0)), num(m(0, 1))}), Json::array({num(m(1, 0)), num(m(1, 1))})});
}
inline Json moments_json(const QuadVector& mean, const CovMat& cov) {
    return Json{{"mean", vec_json(mean.vec())}, {"cov", mat_json(cov.matrix())}};
}

namespace detail {
inline double parse_real(const std::string& s, const std::string& whole) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) throw DomainError("cannot parse complex number '" + whole + "'");
    return v;
}
}  // namespace detail

/// Parses "a", "a+bi", "a-bi", "bi", "i", "-i" (whitespace ignored, 'j' accepted for 'i').
inline std::complex<double> parse_complex(std::string text) {
    text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
    if (text.empty()) throw DomainError("cannot parse empty complex number");
    if (text.back() != 'i' && text.back() != 'j') return {detail::parse_real(text, text), 0.0};
    const std::string body = text.substr(0, text.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) return {0.0, detail::parse_real(body, text)};
    return {detail::parse_real(body.substr(0, split), text), detail::parse_real(body.substr(split), text)};
}

// ---------------------------------------------------------------------------
// Inputs and machine settings

struct InputSpec {
    enum class Kind { Vacuum, Coherent, Squeezed, Thermal } kind = Kind::Vacuum;
    std::complex<double> alpha{0.0, 0.0};
    double xi_mod = 0.0;
    double xi_phase = 0.0;
    double n_thermal = 0.0;

    GaussianState state() const {
        switch (kind) {
            case Kind::Vacuum: return vacuum();
            case Kind::Coherent: return coherent(alpha);
            case Kind::Squeezed: return squeezed(alpha, xi_mod, xi_phase);
            case Kind::Thermal: return thermal(alpha, n_thermal);
        }
        return vacuum();
    }
    std::string kind_name() const {
        switch (kind) {
            case Kind::Vacuum: return "vacuum";
            case Kind::Coherent: return "coherent";
            case Kind::Squeezed: return "squeezed";
            case Kind::Thermal: return "thermal";
        }
        return "vacuum";
    }
    Json to_json() const {
        const GaussianState s = state();
        Json j{{"kind", kind_name()}, {"alpha", Json::array({num(alpha.real()), num(alpha.imag())})}};
        if (kind == Kind::Squeezed) {
            j["xi_mod"] = num(xi_mod);
            j["xi_phase"] = num(xi_phase);
        }
        if (kind == Kind::Thermal) j["n_thermal"] = num(n_thermal);
        j["mean"] = vec_json(s.mean().vec());
        j["cov"] = mat_json(s.cov().matrix());
        return j;
    }
};

inline PropMode parse_prop(const std::string& s) {
    if (s == "physical") return PropMode::Physical;
    if (s == "paper") return PropMode::PaperLinearG;
    throw DomainError("unknown propagation mode '" + s + "' (physical|paper)");
}

/// Machine settings as given on the command line; an absent gain means g = g_s(tau1).
struct MachineSpec {
    double tau1 = 0.5;
    double tau2 = 0.5;
    std::optional<double> g;
    double eta = 1.0;
    PropMode mode = PropMode::Physical;

    ClonerConfig config() const { return at_tau1(tau1); }
    ClonerConfig at_tau1(double t1) const { return at(t1, eta, mode); }
    ClonerConfig at(double t1, double e, PropMode m) const {
        ClonerConfig cfg{t1, tau2, g ? *g : symmetric_gain(t1), e, m};
        cfg.validate();
        return cfg;
    }
};

inline Json config_json(const ClonerConfig& cfg) {
    return Json{{"tau1", num(cfg.tau1)},
                {"tau2", num(cfg.tau2)},
                {"g", num(cfg.g)},
                {"eta", num(cfg.eta)},
                {"prop", std::string(to_string(cfg.mode))}};
}

inline Json report_header(const std::string& command) {
    return Json{{"tool", "linclone"}, {"version", kVersion}, {"command", command}};
}

// ---------------------------------------------------------------------------
// clone

inline Json cmd_clone(const InputSpec& input, const MachineSpec& machine) {
    const ClonerConfig cfg = machine.config();
    const GaussianState in = input.state();
    const CloneOutput out = run_cloner(in, cfg);
    const double f1 = gaussian_fidelity(in, out.clone1);
    const double f2 = gaussian_fidelity(in, out.clone2);
    Json j = report_header("clone");
    j["config"] = config_json(cfg);
    j["input"] = input.to_json();
    Json c1 = moments_json(out.clone1.mean(), out.clone1.cov());
    c1["fidelity"] = num(f1);
    Json c2 = moments_json(out.clone2.mean(), out.clone2.cov());
    c2["fidelity"] = num(f2);
    j["clones"] = Json::array({c1, c2});
    j["cross"] = mat_json(out.cross);
    j["displaced"] = moments_json(out.displaced.mean(), out.displaced.cov());
    j["fidelity"] = num(f1);
    return j;
}

// ---------------------------------------------------------------------------
// sweep

enum class Quantity { Tau1, Xi, SigmaS, N, BigN, MuN };

inline Quantity parse_quantity(const std::string& s) {
    if (s == "tau1") return Quantity::Tau1;
    if (s == "xi") return Quantity::Xi;
    if (s == "sigma_s") return Quantity::SigmaS;
    if (s == "N") return Quantity::N;
    if (s == "bigN") return Quantity::BigN;
    if (s == "mu_N") return Quantity::MuN;
    throw DomainError("unknown sweep quantity '" + s + "' (tau1|xi|sigma_s|N|bigN|mu_N)");
}

inline std::string quantity_name(Quantity q) {
    switch (q) {
        case Quantity::Tau1: return "tau1";
        case Quantity::Xi: return "xi";
        case Quantity::SigmaS: return "sigma_s";
        case Quantity::N: return "N";
        case Quantity::BigN: return "bigN";
        case Quantity::MuN: return "mu_N";
    }
    return "";
}

struct SweepSpec {
    Quantity quantity = Quantity::Tau1;
    double lo = 0.0;
    double hi = 1.0;
    int steps = 101;
    std::vector<double> etas{1.0};
    MachineSpec machine;
    bool both_modes = false;
    RadialWeight radial = RadialWeight::Prior;
    unsigned threads = 0;

    void validate() const {
        if (!(lo < hi)) throw UsageError("sweep: range needs lo < hi");
        if (steps < 2) throw UsageError("sweep: steps must be >= 2");
        if (etas.empty()) throw UsageError("sweep: at least one eta is required");
        for (double e : etas) {
            if (!(e > 0.0 && e <= 1.0)) throw UsageError("sweep: eta values must lie in (0, 1]");
        }
    }
    double abscissa(int i) const { return i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1); }
    std::vector<PropMode> modes() const {
        if (both_modes) return {PropMode::Physical, PropMode::PaperLinearG};
        return {machine.mode};
    }
};

/// Clone-1 fidelity at one sweep abscissa.
inline double sweep_value(const SweepSpec& spec, double x, double eta, PropMode mode) {
    const MachineSpec& m = spec.machine;
    switch (spec.quantity) {
        case Quantity::Tau1: return pipeline_fidelity(coherent(0.0, 0.0), m.at(x, eta, mode));
        case Quantity::Xi: return pipeline_fidelity(squeezed(0.0, x, 0.0), m.at(m.tau1, eta, mode));
        case Quantity::N: return pipeline_fidelity(thermal(0.0, x), m.at(m.tau1, eta, mode));
        case Quantity::SigmaS:
            return average_fidelity(ensemble::GaussianSqueezing{x}, m.at(m.tau1, eta, mode), {}, spec.radial).value;
        case Quantity::BigN: return average_fidelity(ensemble::TopHatThermal{x}, m.at(m.tau1, eta, mode)).value;
        case Quantity::MuN: return average_fidelity(ensemble::HalfGaussianThermal{x}, m.at(m.tau1, eta, mode)).value;
    }
    return 0.0;
}

/// CSV text: abscissa column, then one fidelity column per eta (per eta and
/// mode with both_modes). Rows are computed by a worker pool and written in
/// index order.
inline std::string cmd_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<PropMode> modes = spec.modes();
    const std::size_t cols = spec.etas.size() * modes.size();
    std::vector<std::vector<double>> rows(spec.steps, std::vector<double>(cols));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < spec.steps; i = next++) {
            try {
                const double x = spec.abscissa(i);
                std::size_t c = 0;
                for (double eta : spec.etas) {
                    for (PropMode mode : modes) rows[i][c++] = sweep_value(spec, x, eta, mode);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = spec.steps;
            }
        }
    };
    unsigned threads = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(spec.steps));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::string out = quantity_name(spec.quantity);
    for (double eta : spec.etas) {
        for (PropMode mode : modes) {
            out += ",F_eta_" + format_number(eta);
            if (spec.both_modes) out += "_" + std::string(to_string(mode));
        }
    }
    out += '\n';
    for (int i = 0; i < spec.steps; ++i) {
        out += format_number(spec.abscissa(i));
        for (double v : rows[i]) out += "," + format_number(v);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// average

struct AverageSpec {
    std::string ensemble = "squeezing";  // squeezing | tophat | halfgauss | amplitude
    double width = 1.0;
    RadialWeight radial = RadialWeight::Prior;
};

inline Json cmd_average(const AverageSpec& spec, const MachineSpec& machine) {
    const ClonerConfig cfg = machine.config();
    Ensemble e;
    if (spec.ensemble == "squeezing") {
        e = ensemble::GaussianSqueezing{spec.width};
    } else if (spec.ensemble == "tophat") {
        e = ensemble::TopHatThermal{spec.width};
    } else if (spec.ensemble == "halfgauss") {
        e = ensemble::HalfGaussianThermal{spec.width};
    } else if (spec.ensemble == "amplitude") {
        e = ensemble::GaussianAmplitude{spec.width};
    } else {
        throw DomainError("unknown ensemble '" + spec.ensemble + "' (squeezing|tophat|halfgauss|amplitude)");
    }
    const AveragedFidelity a = average_fidelity(e, cfg, {}, spec.radial);
    Json j = report_header("average");
    j["config"] = config_json(cfg);
    j["ensemble"] = Json{{"kind", spec.ensemble}, {"width", num(spec.width)}};
    j["radial"] = spec.radial == RadialWeight::Prior ? "prior" : "printed";
    j["average_fidelity"] = num(a.value);
    j["error"] = num(a.error);
    return j;
}

// ---------------------------------------------------------------------------
// optimize-gain

inline Json cmd_optimize_gain(double sigma_a2, double eta, PropMode mode) {
    const GainOptimum o = optimal_gain_coherent(sigma_a2, eta, mode);
    Json j = report_header("optimize-gain");
    j["config"] = config_json(ClonerConfig{o.tau1, 0.5, o.g, eta, mode});
    j["sigma_a2"] = num(sigma_a2);
    j["g_opt"] = num(o.g);
    j["tau1_opt"] = num(o.tau1);
    j["f_opt"] = num(o.fidelity);
    j["reference"] = eta == 1.0 ? num(optimal_coherent_fidelity_reference(sigma_a2)) : Json(nullptr);
    j["unimodal"] = o.unimodal;
    return j;
}

// ---------------------------------------------------------------------------
// mc

struct McSpec {
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

inline Json cmd_mc(const InputSpec& input, const MachineSpec& machine, const McSpec& spec) {
    const ClonerConfig cfg = machine.config();
    const GaussianState in = input.state();
    const TrajectoryResult r = run_trajectories(in, cfg, spec.n, spec.seed, {spec.threads, 4096, false});
    const CloneOutput target = run_cloner(in, cfg);

    Json j = report_header("mc");
    j["config"] = config_json(cfg);
    j["input"] = input.to_json();
    j["n"] = spec.n;
    j["seed"] = spec.seed;
    Json clones = Json::array();
    for (int k = 1; k <= 2; ++k) {
        const MomentAccumulator& acc = k == 1 ? r.clone1 : r.clone2;
        const GaussianState& ref = k == 1 ? target.clone1 : target.clone2;
        const Moments m = acc.mixture();
        clones.push_back(Json{{"empirical", moments_json(m.mean, m.cov)},
                              {"analytic", moments_json(ref.mean(), ref.cov())},
                              {"standard_error", vec_json(acc.standard_error())},
                              {"max_abs_z", num(max_abs_z_score(acc, ref))}});
    }
    j["clones"] = clones;
    return j;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    std::string name;
    double value;
    double target;
    double tolerance;
    bool pass() const { return std::abs(value - target) <= tolerance; }
};

/// Cross-checks the phase-space formulas against the number-basis simulator.
/// "quick" uses smaller truncations and fewer random pairs than "full".
inline std::vector<Check> run_verification(const std::string& level) {
    if (level != "quick" && level != "full") throw DomainError("verify: level must be quick or full");
    const bool full = level == "full";
    std::vector<Check> checks;

    for (double eta : {1.0, 0.75, 0.5}) {
        checks.push_back({"coherent_closed_form_eta_" + format_number(eta),
                          clone_fidelity(coherent(0.7, -0.2), ClonerConfig{0.5, 0.5, 1.0, eta}),
                          coherent_clone_fidelity(eta), 1e-12});
    }
    checks.push_back({"squeezed_closed_form", clone_fidelity(squeezed(0.0, 1.0, 0.0), ClonerConfig{}),
                      squeezed_clone_fidelity(1.0, 1.0), 1e-10});
    checks.push_back({"thermal_closed_form", clone_fidelity(thermal(0.0, 1.0), ClonerConfig{}),
                      thermal_clone_fidelity(1.0), 1e-10});

    // Gaussian fidelity against Uhlmann fidelity in the number basis.
    const int dim = full ? 60 : 40;
    const int pairs = full ? 50 : 10;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_state = [&] {
        const double n_th = u(rng);
        const CovMat pure = squeezed_covariance(0.6 * u(rng), 6.283 * u(rng));
        return GaussianState(QuadVector::from_amplitude(std::polar(u(rng), 6.283 * u(rng))),
                             (2.0 * n_th + 1.0) * pure);
    };
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const GaussianState a = random_state();
        const GaussianState b = random_state();
        worst = std::max(worst, std::abs(uhlmann_fidelity_fock(to_fock(a, dim, 1e-6), to_fock(b, dim, 1e-6)) -
                                         gaussian_fidelity(a, b)));
    }
    checks.push_back({"fock_fidelity_random_pairs_max_error", worst, 0.0, 1e-6});

    // Explicit-operator cloner against the phase-space pipeline.
    struct Case {
        const char* name;
        GaussianState state;
        int dim;
    };
    std::vector<Case> cases{{"vacuum", vacuum(), 20}, {"coherent", coherent(0.5, 0.0), 25}};
    if (full) {
        cases.push_back({"thermal", thermal(0.0, 1.0), 30});
        cases.push_back({"squeezed", squeezed(0.0, 0.5, 0.0), 30});
    }
    for (const Case& c : cases) {
        const FockCloneResult out = apply_cloner_fock(to_fock(c.state, c.dim), 1.0);
        const CloneOutput ref = run_cloner(c.state, ClonerConfig{});
        const Moments m = moments(out.clone1);
        const double moment_err = std::max({std::abs(m.mean.x - ref.clone1.mean().x),
                                            std::abs(m.mean.y - ref.clone1.mean().y),
                                            std::abs(m.cov.g11() - ref.clone1.cov().g11()),
                                            std::abs(m.cov.g12() - ref.clone1.cov().g12()),
                                            std::abs(m.cov.g22() - ref.clone1.cov().g22())});
        checks.push_back({std::string("fock_clone_moments_") + c.name, moment_err, 0.0, 1e-3});
        checks.push_back({std::string("fock_clone_fidelity_") + c.name,
                          uhlmann_fidelity_fock(to_fock(c.state, out.clone1.dim()), out.clone1),
                          gaussian_fidelity(c.state, ref.clone1), 1e-3});
    }
    return checks;
}

inline Json verification_json(const std::string& level, const std::vector<Check>& checks) {
    Json j = report_header("verify");
    j["level"] = level;
    Json arr = Json::array();
    bool all = true;
    for (const Check& c : checks) {
        arr.push_back(Json{{"name", c.name},
                           {"value", num(c.value)},
                           {"target", num(c.target)},
                           {"tolerance", num(c.tolerance)},
                           {"pass", c.pass()}});
        all = all && c.pass();
    }
    j["checks"] = arr;
    j["passed"] = all;
    return j;
}

// ---------------------------------------------------------------------------
// Output

/// Default output directory from LINCLONE_OUT_DIR, empty if unset.
inline std::string default_out_dir() {
    const char* dir = std::getenv("LINCLONE_OUT_DIR");
    return dir ? std::string(dir) : std::string();
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Relative paths are taken relative to LINCLONE_OUT_DIR when it is set.
inline std::string resolve_output(const std::string& path) {
    const std::string dir = default_out_dir();
    if (path.empty() || dir.empty() || path.front() == '/') return path;
    return dir + "/" + path;
}

/// Writes to `path`, or stdout when it is empty.
inline void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) throw IoError("failed writing '" + path + "'");
}

}  // namespace linclone::cli
