#include "greedcert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace greedcert {

namespace {

double inverse(double n) { return 1.0 / n; }

/// mu < 1/g, with 1/0 read as +infinity.
bool below_inverse(double mu, Index g) { return g == 0 || mu < inverse(static_cast<double>(g)); }

void require_coherence(double mu) {
    if (!std::isfinite(mu) || mu < 0.0) throw Error(ErrorCode::InvalidParameters, "coherence must be finite and >= 0");
}

void require_below_inverse(double mu, Index g) {
    require_coherence(mu);
    if (!below_inverse(mu, g))
        throw Error(ErrorCode::CoherenceTooLarge, "needs mu < 1/" + std::to_string(g));
}

bool nearly_equal(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    return std::abs(a - b) <= tolerance::boundary * scale;
}

/// Strict mu < bound check. Fills pass/boundary/mu_star; no binding index.
Verdict coherence_verdict(double mu, double bound, const char* what) {
    Verdict v;
    v.mu_star = bound;
    v.pass = mu < bound;
    if (!v.pass) {
        v.boundary = nearly_equal(mu, bound);
        v.reason = std::string("coherence bound ") + what + " violated";
    }
    return v;
}

/// Folds lhs_i > rhs_i (i = 1..n) into v: margins, pass, binding index and
/// boundary flag.
void fold_inequalities(Verdict& v, std::span<const double> lhs, std::span<const double> rhs) {
    v.margins.resize(lhs.size());
    std::optional<Index> first_fail;
    Index tightest = 0;
    double tightest_rel = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        v.margins[i] = lhs[i] - rhs[i];
        if (!(lhs[i] > rhs[i])) {
            if (!first_fail) first_fail = i;
            continue;
        }
        const double rel = v.margins[i] / std::abs(lhs[i]);
        if (rel < tightest_rel) {
            tightest_rel = rel;
            tightest = i;
        }
    }
    if (first_fail) {
        v.pass = false;
        v.binding_index = *first_fail + 1;
        v.boundary = nearly_equal(lhs[*first_fail], rhs[*first_fail]);
        if (v.reason.empty()) v.reason = "inequality at index " + std::to_string(*first_fail + 1) + " not strict";
    } else {
        v.pass = true;
        if (!lhs.empty()) v.binding_index = tightest + 1;
    }
}

void require_full_head(const SignalProfile& profile) {
    profile.validate();
    if (profile.selected_prefix != 0)
        throw Error(ErrorCode::NotApplicable, "theorem is stated for an empty initial selection");
}

void require_noiseless_sparse(const SignalProfile& profile) {
    if (!profile.noiseless_sparse())
        throw Error(ErrorCode::NotApplicable, "theorem covers noiseless exactly sparse signals only");
}

} // namespace

SignalProfile SignalProfile::sparse(std::vector<double> head) {
    SignalProfile p;
    p.k = head.size();
    p.head = std::move(head);
    return p;
}

void SignalProfile::validate() const {
    if (k == 0) throw Error(ErrorCode::InvalidParameters, "sparsity k must be >= 1");
    if (selected_prefix >= k) throw Error(ErrorCode::InvalidParameters, "selected prefix must be < k");
    if (head.size() != k - selected_prefix)
        throw Error(ErrorCode::InvalidParameters, "head must hold the k - g unselected magnitudes");
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (!std::isfinite(head[i]) || !(head[i] > 0.0))
            throw Error(ErrorCode::InvalidParameters, "head magnitudes must be finite and > 0");
        // Ordering is checked up to rounding: tightness vectors hit equality
        // between consecutive entries only up to the last ulp.
        if (i > 0 && head[i] > head[i - 1] * (1.0 + tolerance::boundary))
            throw Error(ErrorCode::InvalidParameters, "head magnitudes must be sorted non-increasing");
    }
    if (!std::isfinite(tail_l1) || tail_l1 < 0.0) throw Error(ErrorCode::InvalidParameters, "tail l1 must be >= 0");
    if (!std::isfinite(noise) || noise < 0.0) throw Error(ErrorCode::InvalidParameters, "noise bound must be >= 0");
}

bool sort_magnitudes(std::vector<double>& values) {
    for (double& v : values) v = std::abs(v);
    const bool sorted = std::is_sorted(values.begin(), values.end(), std::greater<>());
    if (!sorted) std::sort(values.begin(), values.end(), std::greater<>());
    return sorted;
}

double alpha_g(Index g, double mu, Variant variant) {
    require_below_inverse(mu, g);
    const double gd = static_cast<double>(g);
    const double omp = (mu + 1.0) * (1.0 - gd * mu) / (1.0 - (gd - 1.0) * mu);
    return variant == Variant::OMP ? omp : std::sqrt(omp);
}

double mu_g(Index g, double mu, Variant variant) {
    const double a = alpha_g(g, mu, variant);
    return std::min(1.0, mu / (1.0 - static_cast<double>(g) * mu) * a);
}

double gamma_k(Index k, double mu, Variant variant) {
    if (k == 0) throw Error(ErrorCode::InvalidParameters, "k must be >= 1");
    require_below_inverse(mu, k);
    const double kd = static_cast<double>(k);
    if (variant == Variant::OMP) return (1.0 - (kd - 2.0) * mu) / ((mu + 1.0) * (1.0 - kd * mu));
    return std::sqrt((1.0 - (kd - 2.0) * mu) / (mu + 1.0)) * std::sqrt(1.0 - (kd - 1.0) * mu) / (1.0 - kd * mu);
}

double decay_factor(Index i, Index k, Index g, double mu) {
    if (i < 1 || g + i > k)
        throw Error(ErrorCode::InvalidIndex, "decay factor index must satisfy 1 <= i <= k - g", i);
    require_coherence(mu);
    if (g + i == k) return 0.0;
    if (!below_inverse(mu, g + i))
        throw Error(ErrorCode::CoherenceTooLarge, "decay factor needs mu (g + i) < 1");
    const double s = static_cast<double>(g + i);
    return 2.0 * mu * static_cast<double>(k - g - i) / (1.0 - s * mu);
}

Verdict certify_uniform(Index k, double mu) {
    if (k == 0) throw Error(ErrorCode::InvalidParameters, "k must be >= 1");
    require_coherence(mu);
    return coherence_verdict(mu, inverse(2.0 * static_cast<double>(k) - 1.0), "1/(2k-1)");
}

Verdict certify_uniform_termination(Index k, Index g, double mu) {
    if (k == 0 || g >= k) throw Error(ErrorCode::InvalidParameters, "needs 0 <= g < k");
    require_coherence(mu);
    return coherence_verdict(mu, inverse(2.0 * static_cast<double>(k) - static_cast<double>(g) - 1.0),
                             "1/(2k-g-1)");
}

Verdict certify_theorem1(const SignalProfile& profile, double mu) {
    require_full_head(profile);
    require_noiseless_sparse(profile);
    require_coherence(mu);
    if (profile.k < 2) throw Error(ErrorCode::NotApplicable, "needs k >= 2");
    const double l1 = std::accumulate(profile.head.begin(), profile.head.end(), 0.0);
    const double rho = profile.head.front() / l1;
    const double budget = std::min(rho / (2.0 - rho), inverse(2.0 * static_cast<double>(profile.k) - 2.0));
    return coherence_verdict(mu, budget, "mu*");
}

Verdict check_decay_condition(std::span<const double> head, double mu) {
    const Index k = head.size();
    std::vector<double> lhs, rhs;
    for (Index i = 1; i < k; ++i) {
        lhs.push_back(head[i - 1]);
        rhs.push_back(decay_factor(i, k, 0, mu) * head[i]);
    }
    Verdict v;
    fold_inequalities(v, lhs, rhs);
    return v;
}

Theorem2Result certify_theorem2(const SignalProfile& profile, double mu) {
    require_full_head(profile);
    require_noiseless_sparse(profile);
    require_coherence(mu);
    const Index k = profile.k;
    const double kd = static_cast<double>(k);

    Theorem2Result out;
    double budget = inverse(kd);
    for (Index i = 1; i < k; ++i) {
        const double ratio = profile.head[i - 1] / profile.head[i];
        const double star = ratio / (2.0 * static_cast<double>(k - i) + static_cast<double>(i) * ratio);
        out.mu_i_star.push_back(star);
        budget = std::min(budget, star);
    }

    Verdict& v = out.verdict;
    if (mu < inverse(kd)) {
        v = check_decay_condition(profile.head, mu);
    } else {
        v = coherence_verdict(mu, inverse(kd), "1/k");
    }
    v.mu_star = budget;
    return out;
}

Verdict certify_theorem3(const SignalProfile& profile, Index p, Index r, double mu) {
    profile.validate();
    require_noiseless_sparse(profile);
    require_coherence(mu);
    const Index k = profile.k;
    const Index g = profile.selected_prefix;
    const Index remaining = k - g;
    if (p < 1 || p > r || r > remaining)
        throw Error(ErrorCode::InvalidParameters, "needs 1 <= p <= r <= k - g");

    const auto& x = profile.head;
    // x_{i+1} for i = k - g does not exist; its factor is zero there.
    const auto next = [&](Index i) { return i < remaining ? x[i] : 0.0; };

    std::vector<double> lhs, rhs;
    Verdict v;
    if (mu < inverse(static_cast<double>(k))) {
        for (Index i = 1; i <= p; ++i) {
            lhs.push_back(x[i - 1]);
            rhs.push_back(decay_factor(i, k, g, mu) * next(i));
        }
        fold_inequalities(v, lhs, rhs);
        if (v.pass) v.branch = 1;
        if (p == remaining) {
            double budget = inverse(static_cast<double>(k));
            for (Index i = 1; i < remaining; ++i) {
                const double ratio = x[i - 1] / x[i];
                budget = std::min(budget, ratio / (2.0 * static_cast<double>(k - g - i) +
                                                   static_cast<double>(g + i) * ratio));
            }
            v.mu_star = budget;
        }
        return v;
    }
    if (mu < inverse(static_cast<double>(g + r))) {
        const double s = static_cast<double>(g + r);
        const double factor = 2.0 * mu * static_cast<double>(k - g - r) / (1.0 - s * mu);
        for (Index i = 1; i <= p; ++i) {
            lhs.push_back(x[i - 1]);
            rhs.push_back(factor * next(i));
        }
        fold_inequalities(v, lhs, rhs);
        if (v.pass) v.branch = 2;
        return v;
    }
    v.pass = false;
    v.boundary = nearly_equal(mu, inverse(static_cast<double>(g + r)));
    v.reason = "mu >= 1/(g+r): neither branch applies";
    return v;
}

Verdict certify_theorem4(const SignalProfile& profile, double mu) {
    require_full_head(profile);
    require_coherence(mu);
    const Index k = profile.k;
    const double kd = static_cast<double>(k);
    const double bound = inverse(2.0 * kd - 1.0);
    if (!(mu < bound)) return coherence_verdict(mu, bound, "1/(2k-1)");

    const double perturbation = 2.0 * (profile.tail_l1 + profile.noise);
    std::vector<double> lhs, rhs;
    for (Index i = 1; i <= k; ++i) {
        lhs.push_back(profile.head[i - 1]);
        rhs.push_back(perturbation / (1.0 - (2.0 * kd - static_cast<double>(i)) * mu));
    }
    Verdict v;
    fold_inequalities(v, lhs, rhs);
    return v;
}

Verdict certify_donoho_baseline(const SignalProfile& profile, double mu) {
    require_full_head(profile);
    require_coherence(mu);
    if (profile.tail_l1 != 0.0) throw Error(ErrorCode::NotApplicable, "baseline covers exactly sparse signals only");
    const double kd = static_cast<double>(profile.k);
    const double bound = inverse(2.0 * kd - 1.0);
    if (!(mu < bound)) return coherence_verdict(mu, bound, "1/(2k-1)");

    const double threshold = 2.0 * profile.noise / (1.0 - (2.0 * kd - 1.0) * mu);
    std::vector<double> lhs(profile.head.begin(), profile.head.end());
    std::vector<double> rhs(lhs.size(), threshold);
    Verdict v;
    fold_inequalities(v, lhs, rhs);
    return v;
}

Verdict certify_theorem5(const SignalProfile& profile, double mu, Variant variant) {
    require_full_head(profile);
    require_coherence(mu);
    const Index k = profile.k;
    if (!(mu < inverse(static_cast<double>(k)))) return coherence_verdict(mu, inverse(static_cast<double>(k)), "1/k");

    const double noise_term = 2.0 * gamma_k(k, mu, variant) * (profile.noise + profile.tail_l1);
    std::vector<double> lhs, rhs;
    for (Index i = 1; i <= k; ++i) {
        lhs.push_back(profile.head[i - 1]);
        const double decay = i < k ? decay_factor(i, k, 0, mu) * profile.head[i] : 0.0;
        rhs.push_back(decay + noise_term);
    }
    Verdict v;
    fold_inequalities(v, lhs, rhs);
    return v;
}

Verdict check_lemma4_step(std::span<const double> remaining, Index g, double mu, Variant variant, double noise,
                          double tail_l1) {
    if (remaining.empty()) throw Error(ErrorCode::InvalidParameters, "no remaining support atoms");
    const double a = alpha_g(g, mu, variant);
    const double m = mu_g(g, mu, variant);
    double linf = 0.0, l1 = 0.0;
    for (double x : remaining) {
        linf = std::max(linf, std::abs(x));
        l1 += std::abs(x);
    }
    const double lhs = (a + m) * linf - 2.0 * m * l1;
    const double rhs = 2.0 * (noise + tail_l1);
    Verdict v;
    fold_inequalities(v, std::span<const double>(&lhs, 1), std::span<const double>(&rhs, 1));
    return v;
}

namespace {

Verdict evaluate(const std::string& id, const SignalProfile& profile, double mu, const CertifyOptions& options,
                 CertificateQuantities& q) {
    if (id == "uniform") return certify_uniform(profile.k, mu);
    if (id == "uniform_termination") return certify_uniform_termination(profile.k, profile.selected_prefix, mu);
    if (id == "thm1") return certify_theorem1(profile, mu);
    if (id == "thm2") {
        auto res = certify_theorem2(profile, mu);
        q.mu_i_star = res.mu_i_star;
        return res.verdict;
    }
    if (id == "thm3") {
        const Index remaining = profile.k - profile.selected_prefix;
        const Index r = options.r.value_or(remaining);
        const Index p = options.p.value_or(r);
        return certify_theorem3(profile, p, r, mu);
    }
    if (id == "thm4") return certify_theorem4(profile, mu);
    if (id == "donoho") return certify_donoho_baseline(profile, mu);
    if (id == "thm5") return certify_theorem5(profile, mu, options.variant);
    if (id == "lemma4_step")
        return check_lemma4_step(profile.head, profile.selected_prefix, mu, options.variant, profile.noise,
                                 profile.tail_l1);
    throw Error(ErrorCode::InvalidParameters, "unknown theorem id '" + id + "'");
}

CertificateQuantities quantities_for(const SignalProfile& profile, double mu, Variant variant) {
    CertificateQuantities q;
    for (Index g = 0; g < profile.k && below_inverse(mu, g); ++g) {
        q.alpha.push_back(alpha_g(g, mu, variant));
        q.mu_g.push_back(mu_g(g, mu, variant));
    }
    if (below_inverse(mu, profile.k)) q.gamma_k = gamma_k(profile.k, mu, variant);
    if (profile.selected_prefix == 0) {
        const double l1 = std::accumulate(profile.head.begin(), profile.head.end(), 0.0);
        q.rho = profile.head.front() / l1;
    }
    return q;
}

} // namespace

namespace {

CertificateReport certify_ids(std::span<const char* const> ids, const SignalProfile& profile, double mu,
                              const CertifyOptions& options) {
    profile.validate();
    require_coherence(mu);
    CertificateReport report;
    report.k = profile.k;
    report.mu = mu;
    report.variant = options.variant;
    report.quantities = quantities_for(profile, mu, options.variant);
    for (const char* id : ids) {
        Verdict v;
        try {
            v = evaluate(id, profile, mu, options, report.quantities);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotApplicable && e.code() != ErrorCode::CoherenceTooLarge) throw;
            v.applicable = e.code() != ErrorCode::NotApplicable;
            v.pass = false;
            v.reason = e.what();
        }
        report.verdicts.emplace(id, std::move(v));
    }
    return report;
}

} // namespace

CertificateReport certify(const std::string& theorem_id, const SignalProfile& profile, double mu,
                          const CertifyOptions& options) {
    const char* ids[] = {theorem_id.c_str()};
    return certify_ids(ids, profile, mu, options);
}

CertificateReport certify_all(const SignalProfile& profile, double mu, const CertifyOptions& options) {
    return certify_ids(kTheoremIds, profile, mu, options);
}

} // namespace greedcert
