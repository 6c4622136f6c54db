#include "greedcert/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "greedcert/adversarial.hpp"
#include "greedcert/certificates.hpp"
#include "greedcert/experiments.hpp"
#include "greedcert/serialization.hpp"
#include "greedcert/solvers.hpp"

namespace greedcert {

namespace {

// Writes to --out when given, to stdout otherwise.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    write_text(path, text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct SolveArgs {
    std::string dict, y, out, variant = "omp", policy = "lowest";
    Index k = 0;
    double tie_tol = tolerance::tie;
    std::vector<Index> support;
};

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const Dictionary d = normalize_columns(read_matrix_csv(a.dict));
    const Vector y = read_vector_csv(a.y);
    if (static_cast<Index>(y.size()) != d.rows())
        throw Error(ErrorCode::DimensionMismatch, "y has " + std::to_string(y.size()) + " entries, dictionary has " +
                                                      std::to_string(d.rows()) + " rows");
    SolverConfig cfg;
    cfg.variant = parse_variant(a.variant);
    cfg.max_iterations = a.k;
    cfg.tie_tolerance = a.tie_tol;
    cfg.tie_policy = a.policy == "report" ? TiePolicy::ReportAmbiguous : TiePolicy::LowestIndex;
    const RunTrace trace = run_oxx(d, y, cfg);
    Json j = to_json(trace);
    j["coherence"] = d.coherence();
    int code = kExitOk;
    if (!a.support.empty()) {
        IndexSet support;
        for (Index s : a.support) {
            if (s < 1 || s > d.cols()) throw Error(ErrorCode::InvalidIndex, "support index out of range", s);
            support.push_back(s - 1);
        }
        const bool ok = k_step_success(trace, support);
        j["k_step_success"] = ok;
        if (!ok) {
            err << "selected atoms do not match the given support\n";
            code = kExitCheckFailed;
        }
    }
    emit(a.out, dump(j), out);
    return code;
}

struct CertifyArgs {
    std::string theorem = "all", out, variant = "omp";
    Index k = 0, g = 0;
    std::optional<Index> p, r;
    double mu = 0.0, eps = 0.0, tail = 0.0;
    std::vector<double> head;
};

int do_certify(const CertifyArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<double> head = a.head;
    if (!sort_magnitudes(head)) err << "warning: head magnitudes were not sorted non-increasing; sorted them\n";
    if (head.size() != a.k - std::min(a.g, a.k))
        throw Error(ErrorCode::InvalidParameters, "--head needs k - g = " + std::to_string(a.k - std::min(a.g, a.k)) +
                                                      " magnitudes, got " + std::to_string(head.size()));
    SignalProfile profile;
    profile.head = head;
    profile.k = a.k;
    profile.tail_l1 = a.tail;
    profile.noise = a.eps;
    profile.selected_prefix = a.g;

    CertifyOptions opts;
    opts.variant = parse_variant(a.variant);
    opts.p = a.p;
    opts.r = a.r;
    const bool all = a.theorem == "all";
    const CertificateReport report = all ? certify_all(profile, a.mu, opts) : certify(a.theorem, profile, a.mu, opts);
    emit(a.out, dump(to_json(report)), out);
    if (all) return kExitOk;
    return report.verdicts.at(a.theorem).pass ? kExitOk : kExitCheckFailed;
}

struct ConstructArgs {
    Index k = 0;
    std::optional<double> mu;
    std::optional<Index> j;
    double slack = 1.5;
    std::string out, vec;
};

int do_construct(const ConstructArgs& a, std::ostream& out, std::ostream&) {
    if (!a.mu && !a.j) throw Error(ErrorCode::InvalidParameters, "construct needs --mu or --j");
    if (a.j && (a.k < 2 || *a.j < 1 || *a.j >= a.k))
        throw Error(ErrorCode::InvalidParameters, "--j must lie in 1..k-1");
    const double mu = a.mu ? *a.mu : 1.0 / (2.0 * static_cast<double>(a.k) - static_cast<double>(*a.j));
    const AdversarialInstance inst = build_dictionary(a.k, mu);
    emit(a.out, format_matrix_csv(inst.dictionary.atoms()), out);
    if (!a.vec.empty()) {
        if (!a.j) throw Error(ErrorCode::InvalidParameters, "--vec needs --j");
        write_text(a.vec, format_matrix_csv(worst_case_vector(a.k, *a.j, mu, a.slack)));
    }
    return kExitOk;
}

struct ConverseArgs {
    std::string mode = "k", out, variant = "omp";
    Index k = 0;
    std::optional<Index> j;
    double slack = 1.5;
    std::vector<double> coefficients;
};

int do_converse(const ConverseArgs& a, std::ostream& out, std::ostream& err) {
    const Variant v = parse_variant(a.variant);
    ConverseReport rep;
    if (a.mode == "k") {
        std::optional<std::vector<double>> coeffs;
        if (!a.coefficients.empty()) coeffs = a.coefficients;
        rep = demonstrate_converse_k(a.k, v, coeffs, false);
    } else {
        if (!a.j) throw Error(ErrorCode::InvalidParameters, "--mode j needs --j");
        rep = demonstrate_converse_j(a.k, *a.j, a.slack, v, false);
    }
    emit(a.out, dump(to_json(rep)), out);
    for (const auto& f : rep.failures) err << "converse check failed: " << f << "\n";
    return rep.verdict ? kExitOk : kExitCheckFailed;
}

struct ExperimentArgs {
    Index k = 5, trials = 2000, grid_points = 50;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string distribution = "all", out;
};

int do_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream&) {
    const auto grid = default_k_mu_grid(a.grid_points);
    ExperimentResult result;
    if (a.distribution == "all") {
        result = prob_satisfy_decay_all(a.k, grid, a.trials, a.seed, a.threads);
    } else {
        DistributionSpec spec;
        spec.family = parse_family(a.distribution);
        result = prob_satisfy_decay(spec, a.k, grid, a.trials, a.seed, a.threads);
    }
    if (a.out.empty()) {
        out << format_csv(result);
        return kExitOk;
    }
    const std::filesystem::path csv(a.out);
    emit_csv(result, csv);
    std::filesystem::path manifest = csv;
    manifest.replace_extension(".manifest.json");
    write_text(manifest, dump(experiment_manifest(a.k, grid, a.trials, a.seed, csv.filename().string())));
    return kExitOk;
}

struct CurveArgs {
    Index k = 5;
    std::vector<double> mus;
    std::string out;
};

int do_curve(const CurveArgs& a, std::ostream& out, std::ostream&) {
    emit(a.out, format_curve_csv(decay_constraint_curve(a.k, a.mus)), out);
    return kExitOk;
}

struct ValidateArgs {
    ValidationSpec spec;
    std::string variant = "omp", dictionary = "adversarial", out;
};

int do_validate(ValidateArgs a, std::ostream& out, std::ostream& err) {
    a.spec.variant = parse_variant(a.variant);
    a.spec.dictionary = a.dictionary == "random" ? DictionaryKind::Random : DictionaryKind::Adversarial;
    const ValidationReport rep = validate_guarantee(a.spec);
    emit(a.out, dump(to_json(rep)), out);
    for (const auto& d : rep.failure_details) err << d << "\n";
    return rep.failures == 0 && !rep.infeasible ? kExitOk : kExitCheckFailed;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConstructionFailed: return kExitCheckFailed;
    default: return kExitUsage;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Greedy sparse recovery: OMP/OLS runs, coherence certificates, tightness instances"};
    app.require_subcommand(1);
    const auto variants = CLI::IsMember({"omp", "ols"});

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Run OMP or OLS and write the trace as JSON");
    s->add_option("--dict", solve.dict, "Dictionary CSV, atoms as columns")->required()->check(CLI::ExistingFile);
    s->add_option("--y", solve.y, "Data vector CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--k", solve.k, "Number of iterations")->required()->check(CLI::PositiveNumber);
    s->add_option("--variant", solve.variant)->check(variants);
    s->add_option("--tie-tol", solve.tie_tol, "Absolute score gap treated as a tie")->check(CLI::NonNegativeNumber);
    s->add_option("--tie-policy", solve.policy, "lowest: pick the lowest tied index; report: stop at a tie")
        ->check(CLI::IsMember({"lowest", "report"}));
    s->add_option("--support", solve.support, "Expected support (1-based); exit 1 on mismatch")->delimiter(',');
    s->add_option("--out", solve.out, "Output JSON (stdout when omitted)");

    CertifyArgs cert;
    auto* c = app.add_subcommand("certify", "Evaluate recovery certificates for a magnitude profile");
    std::vector<std::string> ids{"all"};
    for (const char* id : kTheoremIds) ids.emplace_back(id);
    c->add_option("--theorem", cert.theorem, "Certificate id or 'all'")->check(CLI::IsMember(ids));
    c->add_option("--k", cert.k, "Sparsity")->required()->check(CLI::PositiveNumber);
    c->add_option("--mu", cert.mu, "Mutual coherence")->required()->check(CLI::Range(0.0, 1.0));
    c->add_option("--head", cert.head, "Magnitudes of the support coefficients")->required()->delimiter(',');
    c->add_option("--eps", cert.eps, "Noise bound")->check(CLI::NonNegativeNumber);
    c->add_option("--tail", cert.tail, "l1 norm of the off-support part")->check(CLI::NonNegativeNumber);
    c->add_option("--g", cert.g, "Atoms already selected (head holds the k - g others)");
    c->add_option("--p", cert.p);
    c->add_option("--r", cert.r);
    c->add_option("--variant", cert.variant)->check(variants);
    c->add_option("--out", cert.out, "Output JSON (stdout when omitted)");

    ConstructArgs cons;
    auto* k = app.add_subcommand("construct", "Write the equiangular (k+1)-atom dictionary and optionally x^(j)");
    k->add_option("--k", cons.k)->required()->check(CLI::PositiveNumber);
    k->add_option("--mu", cons.mu, "Coherence, at most 1/k (default 1/(2k-j))");
    k->add_option("--j", cons.j);
    k->add_option("--slack", cons.slack, "Ratio excess above the decay factor before index j")
        ->check(CLI::Range(1.0, 1e6));
    k->add_option("--out", cons.out, "Dictionary CSV (stdout when omitted)");
    k->add_option("--vec", cons.vec, "Coefficient vector CSV");

    ConverseArgs conv;
    auto* v = app.add_subcommand("verify-converse", "Check the tie on the tightness instances");
    v->add_option("--mode", conv.mode)->required()->check(CLI::IsMember({"k", "j"}));
    v->add_option("--k", conv.k)->required()->check(CLI::PositiveNumber);
    v->add_option("--j", conv.j);
    v->add_option("--slack", conv.slack)->check(CLI::Range(1.0, 1e6));
    v->add_option("--coefficients", conv.coefficients, "Mode k: the k support coefficients")->delimiter(',');
    v->add_option("--variant", conv.variant)->check(variants);
    v->add_option("--out", conv.out, "Output JSON (stdout when omitted)");

    ExperimentArgs exp;
    auto* e = app.add_subcommand("experiment", "Probability of satisfying the decay condition per distribution");
    e->add_option("--k", exp.k)->check(CLI::PositiveNumber);
    e->add_option("--trials", exp.trials)->check(CLI::PositiveNumber);
    e->add_option("--seed", exp.seed);
    e->add_option("--grid-points", exp.grid_points)->check(CLI::PositiveNumber);
    e->add_option("--threads", exp.threads, "Worker threads (0 = all cores)");
    std::vector<std::string> families{"all"};
    for (Family f : kAllFamilies) families.emplace_back(to_string(f));
    e->add_option("--distribution", exp.distribution)->check(CLI::IsMember(families));
    e->add_option("--out", exp.out, "Output CSV (stdout when omitted); a manifest is written next to it");

    CurveArgs curve;
    auto* u = app.add_subcommand("curve", "Decay factors 2mu(k-i)/(1-i mu) for i = 1..k-1");
    u->add_option("--k", curve.k)->required()->check(CLI::PositiveNumber);
    u->add_option("--mu", curve.mus)->required()->delimiter(',');
    u->add_option("--out", curve.out, "Output CSV (stdout when omitted)");

    ValidateArgs val;
    auto* w = app.add_subcommand("validate", "Run the algorithm on random certified instances and count failures");
    w->add_option("--theorem", val.spec.theorem)
        ->check(CLI::IsMember({"uniform", "thm1", "thm2", "thm3", "thm4", "donoho", "thm5"}));
    w->add_option("--k", val.spec.k)->check(CLI::PositiveNumber);
    w->add_option("--mu", val.spec.mu)->check(CLI::Range(0.0, 1.0));
    w->add_option("--trials", val.spec.trials)->check(CLI::PositiveNumber);
    w->add_option("--seed", val.spec.seed);
    w->add_option("--variant", val.variant)->check(variants);
    w->add_option("--dictionary", val.dictionary)->check(CLI::IsMember({"adversarial", "random"}));
    w->add_option("--rows", val.spec.rows);
    w->add_option("--atoms", val.spec.atoms);
    w->add_option("--eps", val.spec.noise)->check(CLI::NonNegativeNumber);
    w->add_option("--tail", val.spec.tail_l1)->check(CLI::NonNegativeNumber);
    w->add_option("--ratio-min", val.spec.ratio_min);
    w->add_option("--ratio-max", val.spec.ratio_max);
    w->add_option("--g", val.spec.selected_prefix);
    w->add_option("--p", val.spec.p);
    w->add_option("--r", val.spec.r);
    w->add_option("--out", val.out, "Output JSON (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*s) return do_solve(solve, out, err);
        if (*c) return do_certify(cert, out, err);
        if (*k) return do_construct(cons, out, err);
        if (*v) return do_converse(conv, out, err);
        if (*e) return do_experiment(exp, out, err);
        if (*u) return do_curve(curve, out, err);
        if (*w) return do_validate(val, out, err);
    } catch (const Error& ex) {
        err << "error (" << to_string(ex.code()) << "): " << ex.what() << "\n";
        return exit_code_for(ex.code());
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace greedcert
