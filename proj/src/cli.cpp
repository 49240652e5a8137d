#include "hjstab/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "hjstab/analysis.hpp"
#include "hjstab/aubry.hpp"
#include "hjstab/certificates.hpp"
#include "hjstab/error.hpp"
#include "hjstab/evolution.hpp"
#include "hjstab/hamiltonian.hpp"

namespace hjstab {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<Subcommand> parse_subcommand(std::string_view name) noexcept {
    if (name == "aubry") return Subcommand::Aubry;
    if (name == "certify") return Subcommand::Certify;
    if (name == "evolve") return Subcommand::Evolve;
    if (name == "stability") return Subcommand::Stability;
    if (name == "periodic") return Subcommand::Periodic;
    if (name == "example1") return Subcommand::Example1;
    if (name == "example2") return Subcommand::Example2;
    return std::nullopt;
}

namespace {

// Everything that is derived from the config before any experiment runs.
struct Setup {
    HamiltonianModel model;
    StationarySolution s;
    AssumptionReport assumptions;
    AubryData a;
    ConstantsLedger ledger;
};

Setup prepare(const ExperimentConfig& c, const std::string& model_id) {
    const double level = c.u0.value_or(model_id == "example2" ? 1.0 : 0.0);
    Setup st;
    st.s = constant_solution(level);
    const ValidityBox box = default_box(st.s);
    st.model = model_id == "example2" ? example2(c.V, c.lambda, box) : example1(c.lambda, box);
    st.assumptions = check_assumptions(st.model, 17);
    st.a = compute_aubry(st.model, st.s, c.aubry_n);
    st.ledger = compute_constants(st.model, st.s, st.a);
    return st;
}

class Report {
public:
    explicit Report(bool quiet) : quiet_(quiet) {}

    template <class... Args>
    void note(fmt::format_string<Args...> f, Args&&... args) {
        line(fmt::format(f, std::forward<Args>(args)...));
    }

    void check(bool ok, std::string_view name, const std::string& detail) {
        line(fmt::format("{} {}: {}", ok ? "PASS" : "FAIL", name, detail));
        if (!ok) ++failures_;
    }

    [[nodiscard]] int failures() const noexcept { return failures_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

private:
    void line(const std::string& s) {
        if (!quiet_) fmt::print("{}\n", s);
        text_ += s;
        text_ += '\n';
    }

    bool quiet_;
    int failures_ = 0;
    std::string text_;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, fmt::format("cannot write '{}'", path.string()));
    out << content;
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

json optional_json(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

std::string trace_csv(const EvolutionTrace& trace) {
    std::string out = "t,sup_dist,min,max\n";
    for (const TraceSample& s : trace.samples) {
        out += fmt::format("{},{},{},{}\n", g17(s.t), g17(s.dist), g17(s.min), g17(s.max));
    }
    return out;
}

std::string snapshot_csv(const EvolutionTrace& trace) {
    std::string out;
    for (const TraceSample& s : trace.samples) {
        if (!s.snapshot) continue;
        out += g17(s.t);
        for (double v : s.snapshot->values()) {
            out += ',';
            out += g17(v);
        }
        out += '\n';
    }
    return out;
}

std::string optional_text(const std::optional<double>& v) { return v ? fmt::format("{:.6g}", *v) : "n/a"; }

void emit_aubry(const Setup& st, const fs::path& out, Report& r) {
    const AubryData& a = st.a;
    const ConstantsLedger& L = st.ledger;
    std::string csv;
    csv += fmt::format("# model={} u0={}\n", st.model.id, g17(st.s.u0(0.0)));
    csv += fmt::format("# mu={}\n# Z={}\n# T={}\n", g17(a.mu), g17(a.Z), g17(a.period_T));
    csv += fmt::format("# M0={}\n# M1={}\n# M2={}\n# alpha={}\n# eps0={}\n", g17(L.M0), g17(L.M1), g17(L.M2),
                       g17(L.alpha), g17(L.eps0));
    csv += fmt::format("# delta0={}\n# eps_tilde1={}\n", L.delta0 ? g17(*L.delta0) : "nan",
                       L.eps_tilde1 ? g17(*L.eps_tilde1) : "nan");
    csv += "x,B,rho,drho,f\n";
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        csv += fmt::format("{},{},{},{},{}\n", g17(a.x[i]), g17(a.B[i]), g17(a.rho[i]), g17(a.drho[i]), g17(a.f[i]));
    }
    write_file(out / "aubry.csv", csv);

    r.note("model {} with u0 = {:.6g}", st.model.id, st.s.u0(0.0));
    r.note("mu = {:.12g}  Z = {:.12g}  T = {:.12g}", a.mu, a.Z, a.period_T);
    r.note("M0 = {:.6g}  M1 = {:.6g}  M2 = {:.6g}  alpha = {:.6g}", L.M0, L.M1, L.M2, L.alpha);
    r.note("eps0 = {:.6g}  delta0 = {}  eps~1 = {}", L.eps0, optional_text(L.delta0), optional_text(L.eps_tilde1));
    const AssumptionReport& h = st.assumptions;
    r.check(h.passed(), "assumptions",
            fmt::format("min H_pp = {:.4g}, max |H_u| = {:.4g} <= kappa = {:.4g}, growth slope = {:.4g}", h.min_d_pp,
                        h.max_abs_d_u, h.kappa, h.growth_slope));
    const double holonomy = std::abs(a.rho.back() - 1.0);
    r.check(holonomy <= 1e-8, "rho(1) = 1", fmt::format("|rho(1) - 1| = {:.3e}", holonomy));
}

CertificateKind kind_from_name(const std::string& name) {
    if (name == "stationary_sub") return CertificateKind::StationarySub;
    if (name == "stationary_super") return CertificateKind::StationarySuper;
    if (name == "evol_sub") return CertificateKind::EvolSub;
    if (name == "evol_super") return CertificateKind::EvolSuper;
    if (name == "periodic_sub") return CertificateKind::PeriodicSub;
    throw Error(ErrorCode::ConfigError, fmt::format("field 'kind': unknown certificate kind '{}'", name));
}

// Certificate of the requested kind at the ledger-admissible eps unless the
// config pins eps explicitly.
Certificate build_certificate(const Setup& st, CertificateKind kind, std::optional<double> eps,
                              std::optional<double> theta, double x0) {
    const AubryData& a = st.a;
    const ConstantsLedger& L = st.ledger;
    Certificate c;
    switch (kind) {
        case CertificateKind::StationarySub:
        case CertificateKind::StationarySuper:
            c = make_stationary(a, L, eps.value_or(kind == CertificateKind::StationarySub ? L.eps0 : -L.eps0));
            break;
        case CertificateKind::EvolSub:
        case CertificateKind::EvolSuper: {
            const double th = theta.value_or(0.5 * a.mu);
            if (eps) {
                c = make_evolutionary(a, L, *eps, th);
            } else {
                double cap = L.eps_tilde0(th);
                c = make_evolutionary(a, L, cap, th);
                // eps = eps~0 would leave a zero-length window in the growth
                // regime; e^-2 eps~0 gives the window [0, 2/|theta|].
                if (c.regime == Regime::FiniteGrowth) cap *= std::exp(-2.0);
                c = make_evolutionary(a, L, cap, th);
                if (c.kind != kind) c = make_evolutionary(a, L, -cap, th);
            }
            break;
        }
        case CertificateKind::PeriodicSub:
            c = make_periodic_sub(a, L, eps.value_or(L.eps_tilde1.value_or(0.0)), x0);
            break;
    }
    if (c.kind != kind) {
        throw Error(ErrorCode::ConfigError, fmt::format("field 'eps': eps = {:.6g} yields a {} profile, not {}", c.eps,
                                                        to_string(c.kind), to_string(kind)));
    }
    return c;
}

struct CertificateOutcome {
    bool passed = false;
    ResidualReport report;
    std::string detail;
};

CertificateOutcome verify(const Certificate& c, const Setup& st, const VerifyGrid& grid) {
    CertificateOutcome out;
    try {
        out.report = verify_certificate(c, st.model, grid);
        out.passed = true;
    } catch (const SignViolation& e) {
        out.report = e.report();
    }
    out.detail = fmt::format("eps = {:.6g}, theta = {:.6g}, residual in [{:.3e}, {:.3e}]", c.eps, c.theta,
                             out.report.min_residual, out.report.max_residual);
    if (!out.passed) {
        out.detail += fmt::format(", worst at (x={:.4g}, t={:.4g})", out.report.worst_x, out.report.worst_t);
    }
    return out;
}

std::string slices_csv(const ResidualReport& report) {
    std::string out = "t,min_residual,max_residual\n";
    for (const ResidualSlice& s : report.slices) {
        out += fmt::format("{},{},{}\n", g17(s.t), g17(s.min_residual), g17(s.max_residual));
    }
    return out;
}

GridFunction read_csv_profile(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, fmt::format("field 'initial': cannot open '{}'", path.string()));
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        const auto comma = line.rfind(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(cell, &used));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: not a number", path.string(), line_no));
        }
    }
    return GridFunction(std::move(values));
}

GridFunction initial_profile(const ExperimentConfig& c, const Setup& st) {
    const auto& u0 = st.s.u0;
    if (c.initial == "offset") {
        return GridFunction::sample(c.n, [&](double x) { return u0(x) + c.initial_offset; });
    }
    if (c.initial == "fourier") {
        return GridFunction::sample(c.n, [&](double x) { return u0(x) + c.phi(x); });
    }
    if (c.initial == "certificate") {
        const Certificate cert = build_certificate(st, kind_from_name(c.kind), c.eps, c.theta, c.x0.front());
        return GridFunction::sample(c.n, [&](double x) { return cert.value(x, 0.0); });
    }
    return read_csv_profile(c.initial_csv);
}

class VerdictLog {
public:
    void add(json object) { lines_ += object.dump() + "\n"; }
    [[nodiscard]] bool empty() const noexcept { return lines_.empty(); }
    void write(const fs::path& path) const { write_file(path, lines_); }

private:
    std::string lines_;
};

void run_stability(const ExperimentConfig& c, const Setup& st, const fs::path& out, Report& r, VerdictLog& log) {
    const double mu = st.a.mu;
    const double delta = c.delta.value_or(mu > 0.0 ? st.ledger.delta0.value_or(1e-3) : 1e-3);
    StabilityOptions opts;
    opts.n = c.n;
    opts.seed = c.seed;
    const StabilityVerdict v = classify_stability(st.model, st.s, st.a, st.ledger, std::max(c.trials, 3), delta, opts);

    for (const TrialResult& t : v.trials) {
        write_file(out / fmt::format("trace_stability_{}.csv", t.index), trace_csv(t.trace));
        log.add({{"command", "stability"},
                 {"trial", t.index},
                 {"label", t.label},
                 {"verdict", std::string(to_string(t.kind))},
                 {"rate", optional_json(t.rate)},
                 {"escape_time", optional_json(t.escape_time)},
                 {"iterations", nullptr},
                 {"variation", nullptr},
                 {"initial_distance", t.initial_distance},
                 {"final_distance", t.final_distance}});
    }

    const VerdictKind predicted = mu > 0.0 ? VerdictKind::AsymptoticallyStable : VerdictKind::Unstable;
    if (mu > 0.0) {
        r.note("predicted: asymptotically stable, rate -mu = {:.6g}", -mu);
        r.note("measured:  {}, worst rate {} over {} trials (delta = {:.6g}, n = {})", to_string(v.kind),
               optional_text(v.measured_rate), v.trials.size(), delta, c.n);
    } else {
        r.note("predicted: Lyapunov unstable, escape from the eps0-tube near ln(eps0/delta)/|mu| = {:.6g}",
               std::log(st.ledger.eps0 / delta) / -mu);
        r.note("measured:  {}, escape time {} (delta = {:.6g}, eps0 = {:.6g}, n = {})", to_string(v.kind),
               optional_text(v.escape_time), delta, st.ledger.eps0, c.n);
    }
    r.check(v.kind == predicted, "stability verdict",
            fmt::format("{} (predicted {})", to_string(v.kind), to_string(predicted)));
    if (mu > 0.0 && v.measured_rate) {
        r.check(std::abs(*v.measured_rate + mu) <= 0.1, "decay rate",
                fmt::format("measured {:.4f} vs -mu = {:.4f} (tol 0.1)", *v.measured_rate, -mu));
    }
}

void run_periodic(const ExperimentConfig& c, const Setup& st, const fs::path& out, Report& r, VerdictLog& log) {
    if (!(st.a.mu < 0.0)) {
        r.check(false, "periodic", fmt::format("needs mu < 0, got {:.6g}", st.a.mu));
        return;
    }
    PeriodicOptions opts;
    opts.n = c.n;
    opts.max_iters = c.max_iters;
    opts.tol = c.tol;
    opts.eps = c.kind == "periodic_sub" ? c.eps : std::nullopt;
    r.note("predicted: infinitely many nontrivial {:.6g}-periodic solutions", st.a.period_T);

    std::vector<std::vector<double>> fixed_points;
    for (std::size_t i = 0; i < c.x0.size(); ++i) {
        const double x0 = c.x0[i];
        json entry = {{"command", "periodic"}, {"anchor", i},        {"x0", x0},          {"rate", nullptr},
                      {"escape_time", nullptr}, {"iterations", nullptr}, {"variation", nullptr}};
        try {
            const PeriodicReport p = find_periodic(st.model, st.s, st.a, st.ledger, x0, opts);
            entry["verdict"] = "Periodic";
            entry["iterations"] = p.iterations;
            entry["variation"] = p.variation;
            entry["return_gap"] = p.return_gap;
            entry["free_return_gap"] = p.free_return_gap;
            entry["monotonicity_defect"] = p.monotonicity_defect;
            entry["seed_margin"] = p.seed_margin;
            write_file(out / fmt::format("trace_periodic_{}.csv", i), trace_csv(p.period_trace));
            std::string profile = "x,seed,fixed_point\n";
            for (std::size_t j = 0; j < p.fixed_point.size(); ++j) {
                profile += fmt::format("{},{},{}\n", g17(static_cast<double>(j) / static_cast<double>(opts.n)),
                                       g17(p.seed[j]), g17(p.fixed_point[j]));
            }
            write_file(out / fmt::format("periodic_profile_{}.csv", i), profile);
            r.check(true, fmt::format("periodic x0={:.4g}", x0),
                    fmt::format("{} iterations, last increment {:.2e}, variation {:.4g}, monotonicity defect {:.2e}",
                                p.iterations, p.increments.back(), p.variation, p.monotonicity_defect));
            fixed_points.push_back(p.fixed_point);
        } catch (const Error& e) {
            entry["verdict"] = std::string(to_string(e.code()));
            r.check(false, fmt::format("periodic x0={:.4g}", x0), e.what());
        }
        log.add(entry);
    }
    for (std::size_t i = 0; i < fixed_points.size(); ++i) {
        for (std::size_t j = i + 1; j < fixed_points.size(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < fixed_points[i].size(); ++k) {
                d = std::max(d, std::abs(fixed_points[i][k] - fixed_points[j][k]));
            }
            r.check(d > c.tol, fmt::format("distinct anchors {:.4g} / {:.4g}", c.x0[i], c.x0[j]),
                    fmt::format("sup distance {:.4g}", d));
        }
    }
}

void run_certify(const ExperimentConfig& c, const Setup& st, const fs::path& out, Report& r) {
    const CertificateKind kind = kind_from_name(c.kind);
    const Certificate cert = build_certificate(st, kind, c.eps, c.theta, c.x0.front());
    VerifyGrid grid;
    grid.nx = c.verify_nx;
    grid.nt = c.verify_nt;
    const CertificateOutcome outcome = verify(cert, st, grid);
    write_file(out / "certify_slices.csv", slices_csv(outcome.report));
    r.check(outcome.passed, fmt::format("certify {}", to_string(kind)), outcome.detail);
}

void run_evolve(const ExperimentConfig& c, const Setup& st, const fs::path& out, Report& r) {
    const GridFunction phi = initial_profile(c, st);
    const GridFunction reference = GridFunction::sample(phi.size(), [&](double x) { return st.s.u0(x); });
    const SchemeConfig scheme = default_scheme_config(st.model, st.s);
    EvolveOptions opts;
    opts.t_final = c.t_final;
    opts.sample_dt = c.sample_dt;
    opts.keep_snapshots = c.snapshots;
    const EvolutionTrace trace = evolve(st.model, scheme, phi, reference, opts);
    write_file(out / "trace_evolve.csv", trace_csv(trace));
    if (c.snapshots) write_file(out / "snapshots.csv", snapshot_csv(trace));
    r.note("evolved n = {} to t = {:.6g}: distance {:.6e} -> {:.6e}", trace.n, trace.back().t,
           trace.samples.front().dist, trace.back().dist);
    r.note("lf_alpha = {:.6g} ({} runtime raises)", trace.lf_alpha, trace.lf_alpha_raises);
    r.check(true, "evolve", fmt::format("{} samples written", trace.samples.size()));
}

void run_example_chain(const ExperimentConfig& c, const Setup& st, bool closed_form_delta0, const fs::path& out,
                       Report& r, VerdictLog& log) {
    emit_aubry(st, out, r);
    const double mu = st.a.mu;
    const ConstantsLedger& L = st.ledger;

    if (closed_form_delta0 && mu > 0.0 && L.delta0) {
        const double closed = mu * L.M2 * L.M2 / (4.0 * L.M1 * (L.M2 + L.M1));
        r.check(std::abs(*L.delta0 - closed) <= 1e-10, "delta0 closed form",
                fmt::format("delta0 = {:.12g}, mu M2^2 / (4 M1 (M1 + M2)) = {:.12g}", *L.delta0, closed));
    }

    VerifyGrid grid;
    grid.nx = c.verify_nx;
    grid.nt = c.verify_nt;
    std::vector<Certificate> certs;
    certs.push_back(build_certificate(st, CertificateKind::StationarySub, std::nullopt, std::nullopt, 0.0));
    certs.push_back(build_certificate(st, CertificateKind::StationarySuper, std::nullopt, std::nullopt, 0.0));
    certs.push_back(build_certificate(st, CertificateKind::EvolSub, std::nullopt, 0.5 * mu, 0.0));
    certs.push_back(build_certificate(st, CertificateKind::EvolSuper, std::nullopt, 0.5 * mu, 0.0));
    if (mu > 0.0) {
        certs.push_back(build_certificate(st, CertificateKind::EvolSub, std::nullopt, 2.0 * mu, 0.0));
        certs.push_back(build_certificate(st, CertificateKind::EvolSuper, std::nullopt, 2.0 * mu, 0.0));
    } else {
        certs.push_back(build_certificate(st, CertificateKind::PeriodicSub, std::nullopt, std::nullopt, c.x0.front()));
    }
    for (const Certificate& cert : certs) {
        const CertificateOutcome outcome = verify(cert, st, grid);
        r.check(outcome.passed, fmt::format("certificate {}", to_string(cert.kind)), outcome.detail);
    }

    run_stability(c, st, out, r, log);
    if (mu > 0.0) {
        RateBoundsOptions opts;
        opts.n = c.n;
        opts.seed = c.seed;
        const RateBoundsReport rb = rate_bounds_check(st.model, st.s, st.a, L, opts);
        double worst = -std::numeric_limits<double>::infinity();
        for (const RateMeasurement& m : rb.random_trials) worst = std::max(worst, m.rate_extrapolated);
        r.check(rb.upper_ok, "rate upper bound",
                fmt::format("slowest random decay {:.4f} <= -mu + {:.2g} = {:.4f}", worst, rb.tol, -mu + rb.tol));
        r.check(rb.lower_ok, "rate lower bound",
                fmt::format("extremal decay {:.4f} >= -mu - {:.2g} = {:.4f}", rb.extremal.rate_extrapolated, rb.tol,
                            -mu - rb.tol));
    } else {
        run_periodic(c, st, out, r, log);
    }
}

}  // namespace

int run(const ExperimentConfig& config, Subcommand subcommand, const RunOptions& options) {
    fs::create_directories(options.out_dir);
    const fs::path& out = options.out_dir;
    std::string model_id = config.model;
    if (subcommand == Subcommand::Example1) model_id = "example1";
    if (subcommand == Subcommand::Example2) model_id = "example2";

    Report r(options.quiet);
    VerdictLog log;
    const Setup st = prepare(config, model_id);
    switch (subcommand) {
        case Subcommand::Aubry: emit_aubry(st, out, r); break;
        case Subcommand::Certify: run_certify(config, st, out, r); break;
        case Subcommand::Evolve: run_evolve(config, st, out, r); break;
        case Subcommand::Stability: run_stability(config, st, out, r, log); break;
        case Subcommand::Periodic: run_periodic(config, st, out, r, log); break;
        case Subcommand::Example1: run_example_chain(config, st, true, out, r, log); break;
        case Subcommand::Example2: run_example_chain(config, st, false, out, r, log); break;
    }
    if (!log.empty()) log.write(out / "verdicts.jsonl");
    r.note("{} check(s) failed", r.failures());
    write_file(out / "report.txt", r.text());
    return r.failures() == 0 ? 0 : 1;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Stability experiments for contact Hamilton-Jacobi equations on the circle"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    std::optional<int> n;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "Experiment config (key = value)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--n", n, "Grid size (overrides the config)");
    app.add_option("--seed", seed, "Random seed (overrides the config)");
    app.add_flag("--quiet", quiet, "Only write report.txt");

    const std::pair<const char*, const char*> commands[] = {
        {"aubry", "Aubry quantities and constants; writes aubry.csv"},
        {"certify", "Verify one sub/supersolution certificate"},
        {"evolve", "Run the monotone scheme; writes trace_evolve.csv"},
        {"stability", "Classify stability from perturbed evolutions"},
        {"periodic", "Search for nontrivial periodic solutions"},
        {"example1", "Full chain for H = p^2 + p + lambda(x) u"},
        {"example2", "Full chain for H = p^2 + V(x) p + lambda(x)(sqrt(u^2+1) - sqrt 2)"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (n) config.n = *n;
        if (seed) config.seed = *seed;
        if (config.n < GridFunction::kMinSize) {
            throw Error(ErrorCode::ConfigError, fmt::format("field 'n': must be >= {}", GridFunction::kMinSize));
        }
        const auto subcommand = parse_subcommand(app.get_subcommands().front()->get_name());
        RunOptions options;
        options.out_dir = out_dir;
        options.quiet = quiet;
        return run(config, *subcommand, options);
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return e.code() == ErrorCode::ConfigError ? 2 : 1;
    }
}

}  // namespace hjstab
