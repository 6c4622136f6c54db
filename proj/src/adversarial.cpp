#include "greedcert/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace greedcert {

namespace {

void require_equiangular_coherence(Index k, double mu) {
    if (k == 0) throw Error(ErrorCode::InvalidParameters, "k must be >= 1");
    if (!std::isfinite(mu) || mu < 0.0 || mu * static_cast<double>(k) > 1.0 + 1e-14)
        throw Error(ErrorCode::InvalidCoherence, "equiangular Gram matrix needs 0 <= mu <= 1/k");
}

bool contains(const IndexSet& s, Index i) { return std::find(s.begin(), s.end(), i) != s.end(); }

std::string fmt_index(Index i) { return std::to_string(i + 1); }

} // namespace

Matrix build_gram(Index k, double mu) {
    require_equiangular_coherence(k, mu);
    const auto n = static_cast<Eigen::Index>(k + 1);
    Matrix g = Matrix::Constant(n, n, -mu);
    g.diagonal().setOnes();
    return g;
}

AdversarialInstance build_dictionary(Index k, double mu) {
    Matrix gram = build_gram(k, mu);
    const auto n = static_cast<Eigen::Index>(k + 1);

    // Column 0: all-ones direction; columns 1..k: e_1..e_k orthogonalized
    // against everything before them (twice, for a clean basis).
    Matrix u(n, n);
    u.col(0) = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (Eigen::Index c = 1; c < n; ++c) {
        Vector v = Vector::Unit(n, c - 1);
        for (int pass = 0; pass < 2; ++pass) v -= u.leftCols(c) * (u.leftCols(c).transpose() * v);
        u.col(c) = v.normalized();
    }

    Vector sqrt_lambda(n);
    sqrt_lambda[0] = std::sqrt(std::max(0.0, 1.0 - static_cast<double>(k) * mu));
    sqrt_lambda.tail(n - 1).setConstant(std::sqrt(1.0 + mu));
    const Matrix atoms = sqrt_lambda.asDiagonal() * u.transpose();

    return AdversarialInstance{k, mu, normalize_columns(atoms), std::move(gram), std::nullopt, std::nullopt};
}

Vector worst_case_vector(Index k, Index j, double mu, double slack) {
    if (k < 2 || j < 1 || j > k - 1)
        throw Error(ErrorCode::InvalidParameters, "needs 1 <= j <= k - 1");
    if (!(slack > 1.0) || !std::isfinite(slack)) throw Error(ErrorCode::InvalidParameters, "slack must be > 1");
    if (!std::isfinite(mu) || !(mu > 0.0) || !(mu * static_cast<double>(j) < 1.0))
        throw Error(ErrorCode::InvalidParameters, "needs 0 < mu < 1/j");

    Vector x = Vector::Zero(static_cast<Eigen::Index>(k + 1));
    for (Index i = j + 1; i <= k; ++i) x[static_cast<Eigen::Index>(i - 1)] = 1.0;
    x[static_cast<Eigen::Index>(j - 1)] = decay_factor(j, k, 0, mu) * x[static_cast<Eigen::Index>(j)];
    for (Index i = j - 1; i >= 1; --i)
        x[static_cast<Eigen::Index>(i - 1)] = slack * decay_factor(i, k, 0, mu) * x[static_cast<Eigen::Index>(i)];
    return x;
}

Lemma5Report verify_lemma5(const AdversarialInstance& instance, std::span<const Index> active, Variant variant) {
    if (active.size() + 1 > instance.k)
        throw Error(ErrorCode::InvalidParameters, "active set size must be <= k - 1");
    const Index g = active.size();
    const ProjectedState state = projected_atoms(instance.dictionary, active);
    const Matrix& c = variant == Variant::OMP ? state.projected : state.normalized;
    const Matrix cross = c.transpose() * state.projected;

    Lemma5Report rep;
    rep.g = g;
    rep.variant = variant;
    rep.alpha = alpha_g(g, instance.mu, variant);
    rep.mu_g = mu_g(g, instance.mu, variant);
    const auto n = static_cast<Index>(cross.rows());
    for (Index i = 0; i < n; ++i) {
        if (state.is_active(i)) continue;
        for (Index l = 0; l < n; ++l) {
            if (state.is_active(l)) continue;
            const double v = cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
            if (i == l)
                rep.max_diagonal_deviation = std::max(rep.max_diagonal_deviation, std::abs(v - rep.alpha));
            else
                rep.max_offdiagonal_deviation = std::max(rep.max_offdiagonal_deviation, std::abs(v + rep.mu_g));
        }
    }
    return rep;
}

double max_lemma5_deviation(const AdversarialInstance& instance, Variant variant) {
    double worst = 0.0;
    IndexSet active;
    for (Index g = 0; g < instance.k; ++g) {
        worst = std::max(worst, verify_lemma5(instance, active, variant).max_deviation());
        active.push_back(g);
    }
    return worst;
}

namespace {

ConverseStep step_from(const RunTrace& trace, std::size_t s) {
    const StepRecord& rec = trace.steps[s];
    ConverseStep out;
    out.g = rec.iteration;
    out.active_set.assign(trace.final_active_set.begin(), trace.final_active_set.begin() + static_cast<long>(s));
    out.tie_set = rec.tie_set;
    out.correlations = rec.correlations;
    return out;
}

/// Gap between |c_a| and |c_b| plus the sign relation c_a + c_b = 0, both
/// absolute and relative to the score scale.
bool tie_holds(double ca, double cb, double& gap) {
    gap = std::abs(std::abs(ca) - std::abs(cb));
    const double scale = std::max(std::abs(ca), std::abs(cb));
    const double sum = std::abs(ca + cb);
    return gap <= tolerance::tie && gap <= tolerance::tie * scale && sum <= tolerance::tie * std::max(1.0, scale) &&
           scale > 0.0;
}

void finish(ConverseReport& rep, bool strict) {
    rep.verdict = rep.failures.empty();
    if (strict && !rep.verdict) {
        std::string msg = "converse demonstration (mode " + rep.mode + ", k=" + std::to_string(rep.k) + ") failed:";
        for (const auto& f : rep.failures) msg += " " + f + ";";
        throw Error(ErrorCode::ConstructionFailed, msg);
    }
}

} // namespace

ConverseReport demonstrate_converse_k(Index k, Variant variant, std::optional<std::vector<double>> coefficients,
                                      bool strict) {
    if (k < 1) throw Error(ErrorCode::InvalidParameters, "k must be >= 1");
    const double mu = 1.0 / static_cast<double>(k);
    const AdversarialInstance inst = build_dictionary(k, mu);

    ConverseReport rep;
    rep.mode = "k";
    rep.k = k;
    rep.mu = mu;
    rep.variant = variant;
    rep.coefficients = Vector::Zero(static_cast<Eigen::Index>(k + 1));
    if (coefficients) {
        if (coefficients->size() != k)
            throw Error(ErrorCode::InvalidParameters, "need exactly k coefficients on the support");
        for (Index i = 0; i < k; ++i) {
            if ((*coefficients)[i] == 0.0 || !std::isfinite((*coefficients)[i]))
                throw Error(ErrorCode::InvalidParameters, "support coefficients must be finite and nonzero");
            rep.coefficients[static_cast<Eigen::Index>(i)] = (*coefficients)[i];
        }
    } else {
        for (Index i = 0; i < k; ++i) rep.coefficients[static_cast<Eigen::Index>(i)] = static_cast<double>(k - i);
    }
    rep.max_lemma5_deviation = max_lemma5_deviation(inst, variant);
    if (rep.max_lemma5_deviation > tolerance::tie)
        rep.failures.push_back("projected correlations deviate from alpha_g/-mu_g");

    const Vector y = inst.dictionary.atoms() * rep.coefficients;
    const Index intruder = k;  // atom k+1

    // Every way of having picked k-1 correct atoms.
    for (Index remaining = 0; remaining < k; ++remaining) {
        IndexSet active;
        for (Index i = 0; i < k; ++i)
            if (i != remaining) active.push_back(i);
        const ProjectedState state = projected_state(inst.dictionary, active, y);
        const Selection sel = select_next(state, variant, tolerance::tie);

        ConverseStep step;
        step.g = k - 1;
        step.active_set = active;
        step.tie_set = sel.tie_set;
        step.correlations = sel.correlations;
        rep.steps.push_back(step);

        double gap = 0.0;
        const bool ok = tie_holds(sel.correlations.at(remaining), sel.correlations.at(intruder), gap);
        rep.max_tie_gap = std::max(rep.max_tie_gap, gap);
        if (!ok || !contains(sel.tie_set, remaining) || !contains(sel.tie_set, intruder))
            rep.failures.push_back("no tie between atoms " + fmt_index(remaining) + " and " + fmt_index(intruder));
    }

    // The algorithm itself must either go wrong or reach the ambiguous step.
    SolverConfig cfg;
    cfg.variant = variant;
    cfg.max_iterations = k;
    const RunTrace replay = run_oxx(inst.dictionary, y, cfg);
    bool wrong_or_tied = false;
    for (const auto& s : replay.steps)
        if (s.selected == intruder || contains(s.tie_set, intruder)) wrong_or_tied = true;
    if (!wrong_or_tied) rep.failures.push_back("replay selected the support without ambiguity");

    finish(rep, strict);
    return rep;
}

ConverseReport demonstrate_converse_j(Index k, Index j, double slack, Variant variant, bool strict) {
    if (k < 2 || j < 1 || j > k - 1) throw Error(ErrorCode::InvalidParameters, "needs k >= 2 and 1 <= j <= k - 1");
    const double mu = 1.0 / (2.0 * static_cast<double>(k) - static_cast<double>(j));
    AdversarialInstance inst = build_dictionary(k, mu);
    inst.j = j;
    inst.worst_vector = worst_case_vector(k, j, mu, slack);

    ConverseReport rep;
    rep.mode = "j";
    rep.k = k;
    rep.mu = mu;
    rep.j = j;
    rep.slack = slack;
    rep.variant = variant;
    rep.coefficients = *inst.worst_vector;
    rep.max_lemma5_deviation = max_lemma5_deviation(inst, variant);
    if (rep.max_lemma5_deviation > tolerance::tie)
        rep.failures.push_back("projected correlations deviate from alpha_g/-mu_g");

    const Vector y = inst.dictionary.atoms() * rep.coefficients;
    SolverConfig cfg;
    cfg.variant = variant;
    cfg.max_iterations = j;
    const RunTrace replay = run_oxx(inst.dictionary, y, cfg);
    for (std::size_t s = 0; s < replay.steps.size(); ++s) rep.steps.push_back(step_from(replay, s));

    if (replay.steps.size() != j) {
        rep.failures.push_back("replay stopped early (" + std::string(to_string(replay.stop_reason)) + ")");
    } else {
        for (Index g = 0; g + 1 < j; ++g) {
            const auto& s = replay.steps[g];
            if (s.tie_set != IndexSet{g} || s.selected != g)
                rep.failures.push_back("step " + std::to_string(g + 1) + " is not a unique pick of atom " +
                                       fmt_index(g));
        }
        const auto& last = replay.steps[j - 1];
        const Index correct = j - 1;
        const Index intruder = k;
        double gap = 0.0;
        const double c_correct = last.correlations.at(correct);
        const bool ok = tie_holds(c_correct, last.correlations.at(intruder), gap);
        rep.max_tie_gap = gap;
        if (!ok || !contains(last.tie_set, correct) || !contains(last.tie_set, intruder))
            rep.failures.push_back("no tie between atoms " + fmt_index(correct) + " and " + fmt_index(intruder) +
                                   " at step " + std::to_string(j));
        if (c_correct < -tolerance::tie) rep.failures.push_back("correct atom correlation is negative");
    }

    std::vector<double> head(rep.coefficients.data(), rep.coefficients.data() + k);
    SignalProfile profile = SignalProfile::sparse(head);
    Verdict cert = certify_theorem2(profile, mu).verdict;
    bool cert_ok = !cert.pass && cert.boundary && cert.binding_index == j;
    for (Index i = 1; i < k && cert_ok; ++i)
        if (i != j && !(cert.margins[i - 1] > 0.0)) cert_ok = false;
    if (!cert_ok) rep.failures.push_back("decay certificate is not on its boundary at index " + std::to_string(j));
    rep.certificate = std::move(cert);

    finish(rep, strict);
    return rep;
}

} // namespace greedcert
