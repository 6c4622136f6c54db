#include "greedcert/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "greedcert/adversarial.hpp"

namespace greedcert {

namespace {

constexpr std::uint64_t kValidationStream = 0x76616c6964ULL;

std::string fixed(double value, int decimals) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(decimals);
    out << value;
    return out.str();
}

std::string shortest(double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    // Prefer the shortest representation that round-trips.
    for (int p = 1; p <= 17; ++p) {
        std::ostringstream trial;
        trial.precision(p);
        trial << value;
        if (std::stod(trial.str()) == value) return trial.str();
    }
    return out.str();
}

// Runs body(i) for i in [0, count) on up to `threads` workers.
template <class Body>
void parallel_for(Index count, unsigned threads, Body&& body) {
    threads = static_cast<unsigned>(std::min<Index>(std::max(1u, threads), std::max<Index>(count, 1)));
    if (threads <= 1) {
        for (Index i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (Index i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

double draw_magnitude(const DistributionSpec& spec, std::mt19937_64& rng) {
    switch (spec.family) {
    case Family::Bernoulli:
        return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
    case Family::Uniform:
        return std::uniform_real_distribution<double>(-spec.scale, spec.scale)(rng);
    case Family::Normal:
        return std::normal_distribution<double>(0.0, spec.scale)(rng);
    case Family::Laplacian: {
        const double magnitude = std::exponential_distribution<double>(1.0 / spec.scale)(rng);
        return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
    }
    case Family::LogLogistic: {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double magnitude = spec.scale * std::pow(u / (1.0 - u), 1.0 / spec.shape);
        return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
    }
    }
    return 0.0;
}

} // namespace

const char* to_string(Family f) noexcept {
    switch (f) {
    case Family::Bernoulli: return "bernoulli";
    case Family::Uniform: return "uniform";
    case Family::Normal: return "normal";
    case Family::Laplacian: return "laplacian";
    case Family::LogLogistic: return "loglogistic";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    for (Family f : kAllFamilies)
        if (name == to_string(f)) return f;
    throw Error(ErrorCode::InvalidParameters, "unknown distribution '" + name + "'");
}

void DistributionSpec::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidParameters, "scale must be positive");
    if (!(shape > 0.0) || !std::isfinite(shape)) throw Error(ErrorCode::InvalidParameters, "shape must be positive");
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t family, std::uint64_t grid_index,
                             std::uint64_t trial) {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffULL); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(family), hi(family), lo(grid_index), hi(grid_index), lo(trial), hi(trial)};
    return std::mt19937_64(seq);
}

std::vector<double> sample_coefficients(const DistributionSpec& spec, Index k, std::mt19937_64& stream) {
    spec.validate();
    if (k < 1) throw Error(ErrorCode::InvalidParameters, "k must be >= 1");
    std::vector<double> out(k);
    for (auto& v : out) {
        do {
            v = draw_magnitude(spec, stream);
        } while (v == 0.0 || !std::isfinite(v));
    }
    return out;
}

std::vector<double> default_k_mu_grid(Index points) {
    if (points < 1) throw Error(ErrorCode::InvalidParameters, "grid needs at least one point");
    std::vector<double> grid(points);
    for (Index q = 1; q <= points; ++q) grid[q - 1] = static_cast<double>(q) / static_cast<double>(points);
    return grid;
}

unsigned effective_threads(unsigned requested) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (const char* env = std::getenv("GREEDCERT_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

ExperimentResult prob_satisfy_decay(const DistributionSpec& spec, Index k, const std::vector<double>& k_mu_grid,
                                    Index trials, std::uint64_t seed, unsigned threads) {
    spec.validate();
    if (k < 1) throw Error(ErrorCode::InvalidParameters, "k must be >= 1");
    if (trials < 1) throw Error(ErrorCode::InvalidParameters, "trials must be >= 1");
    for (double v : k_mu_grid)
        if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidParameters, "grid values must lie in (0, 1]");

    ExperimentResult result;
    result.rows.resize(k_mu_grid.size());
    const auto family = static_cast<std::uint64_t>(spec.family);
    parallel_for(k_mu_grid.size(), effective_threads(threads), [&](Index q) {
        const double mu = k_mu_grid[q] / static_cast<double>(k);
        Index successes = 0;
        for (Index t = 0; t < trials; ++t) {
            auto stream = trial_stream(seed, family, q, t);
            auto x = sample_coefficients(spec, k, stream);
            sort_magnitudes(x);
            if (check_decay_condition(x, mu).pass) ++successes;
        }
        result.rows[q] = ExperimentRow{k_mu_grid[q], spec.family,
                                       static_cast<double>(successes) / static_cast<double>(trials), successes,
                                       trials, seed};
    });
    return result;
}

ExperimentResult prob_satisfy_decay_all(Index k, const std::vector<double>& k_mu_grid, Index trials,
                                        std::uint64_t seed, unsigned threads) {
    ExperimentResult all;
    for (Family f : kAllFamilies) {
        DistributionSpec spec;
        spec.family = f;
        auto part = prob_satisfy_decay(spec, k, k_mu_grid, trials, seed, threads);
        all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
    }
    return all;
}

std::vector<CurvePoint> decay_constraint_curve(Index k, const std::vector<double>& mus) {
    if (k < 2) throw Error(ErrorCode::InvalidParameters, "curve needs k >= 2");
    const double limit = 1.0 / static_cast<double>(k);
    std::vector<CurvePoint> out;
    for (double mu : mus) {
        if (!(mu > 0.0 && mu <= limit))
            throw Error(ErrorCode::InvalidCoherence, "curve coherence must lie in (0, 1/k]");
        for (Index i = 1; i < k; ++i) out.push_back(CurvePoint{mu, i, decay_factor(i, k, 0, mu)});
    }
    return out;
}

std::string format_csv(const ExperimentResult& result) {
    std::vector<ExperimentRow> rows = result.rows;
    std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
        const std::string fa = to_string(a.family), fb = to_string(b.family);
        if (fa != fb) return fa < fb;
        return a.k_mu < b.k_mu;
    });
    std::string out = "k_mu,distribution,probability,trials,seed\n";
    for (const auto& r : rows) {
        out += shortest(r.k_mu) + ',' + to_string(r.family) + ',' + fixed(r.probability, 6) + ',' +
               std::to_string(r.trials) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

void emit_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << format_csv(result);
    if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

std::string format_curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "mu,i,factor\n";
    for (const auto& p : curve) out += shortest(p.mu) + ',' + std::to_string(p.i) + ',' + shortest(p.factor) + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Guarantee validation

void ValidationSpec::validate() const {
    static const char* const kSupported[] = {"uniform", "thm1", "thm2", "thm3", "thm4", "donoho", "thm5"};
    if (std::find_if(std::begin(kSupported), std::end(kSupported), [&](const char* id) { return theorem == id; }) ==
        std::end(kSupported))
        throw Error(ErrorCode::InvalidParameters, "theorem '" + theorem + "' cannot be validated end to end");
    if (k < 1) throw Error(ErrorCode::InvalidParameters, "k must be >= 1");
    if (!(mu >= 0.0 && mu < 1.0)) throw Error(ErrorCode::InvalidCoherence, "mu must lie in [0, 1)");
    if (trials < 1 || attempts_per_trial < 1 || trials_per_dictionary < 1)
        throw Error(ErrorCode::InvalidParameters, "trial counts must be >= 1");
    if (!(noise >= 0.0) || !(tail_l1 >= 0.0)) throw Error(ErrorCode::InvalidParameters, "noise and tail must be >= 0");
    if (!(ratio_min >= 1.0) || !(ratio_max >= ratio_min))
        throw Error(ErrorCode::InvalidParameters, "need 1 <= ratio_min <= ratio_max");
    if (selected_prefix >= k) throw Error(ErrorCode::InvalidParameters, "selected prefix must be < k");
    if (theorem != "thm3" && selected_prefix != 0)
        throw Error(ErrorCode::InvalidParameters, "selected prefix is only meaningful for thm3");
    const bool noisy_theorem = theorem == "thm4" || theorem == "thm5" || theorem == "donoho";
    if (!noisy_theorem && (noise > 0.0 || tail_l1 > 0.0))
        throw Error(ErrorCode::InvalidParameters, theorem + " covers noiseless sparse signals only");
    if (theorem == "donoho" && tail_l1 > 0.0)
        throw Error(ErrorCode::InvalidParameters, "donoho covers exactly sparse signals only");
    if (dictionary == DictionaryKind::Adversarial && mu * static_cast<double>(k) > 1.0)
        throw Error(ErrorCode::InvalidCoherence, "adversarial dictionary needs mu <= 1/k");
    if (dictionary == DictionaryKind::Random) {
        const Index n = atoms == 0 ? k + 4 : atoms;
        if (rows < k || rows > 32 || n <= k || n > 64)
            throw Error(ErrorCode::InvalidDimensions, "random dictionaries need k <= m <= 32 and k < n <= 64");
    }
}

namespace {

// Unit columns drawn one at a time; a column is redrawn until its coherence
// with the accepted ones is at most mu_cap.
std::optional<Dictionary> random_dictionary(Index m, Index n, double mu_cap, std::mt19937_64& rng) {
    constexpr Index kColumnBudget = 20000;
    std::normal_distribution<double> normal;
    Matrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Index c = 0; c < n; ++c) {
        Index tries = 0;
        for (;; ++tries) {
            if (tries == kColumnBudget) return std::nullopt;
            Vector v(static_cast<Eigen::Index>(m));
            for (auto& e : v) e = normal(rng);
            v.normalize();
            bool ok = true;
            for (Index p = 0; p < c && ok; ++p) ok = std::abs(a.col(static_cast<Eigen::Index>(p)).dot(v)) <= mu_cap;
            if (ok) {
                a.col(static_cast<Eigen::Index>(c)) = v;
                break;
            }
        }
    }
    return normalize_columns(a);
}

struct Instance {
    Vector y;
    IndexSet support;       // ordered by decreasing magnitude
    SignalProfile profile;
    IndexSet initial;       // thm3: atoms assumed already selected
};

IndexSet random_subset(Index n, Index size, std::mt19937_64& rng) {
    IndexSet all(n);
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(size);
    return all;
}

Instance draw_instance(const Dictionary& d, const ValidationSpec& spec, std::mt19937_64& rng) {
    const Index n = d.cols();
    const Index k = spec.k;
    std::uniform_real_distribution<double> ratio(spec.ratio_min, spec.ratio_max);
    std::bernoulli_distribution coin(0.5);

    // Smallest magnitude log-uniform on [0.1, 10] so that noisy certificates
    // see instances on both sides of their thresholds.
    std::vector<double> magnitudes(k);
    magnitudes[k - 1] = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    for (Index i = k - 1; i-- > 0;) magnitudes[i] = magnitudes[i + 1] * ratio(rng);

    Instance inst;
    inst.support = random_subset(n, k, rng);
    Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
    for (Index i = 0; i < k; ++i)
        x[static_cast<Eigen::Index>(inst.support[i])] = coin(rng) ? magnitudes[i] : -magnitudes[i];

    double tail = 0.0;
    if (spec.tail_l1 > 0.0 && n > k) {
        std::vector<bool> on_support(n, false);
        for (Index s : inst.support) on_support[s] = true;
        std::exponential_distribution<double> weight(1.0);
        std::vector<std::pair<Index, double>> w;
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (on_support[i]) continue;
            w.emplace_back(i, weight(rng));
            total += w.back().second;
        }
        for (auto [i, wi] : w) {
            const double value = spec.tail_l1 * wi / total;
            x[static_cast<Eigen::Index>(i)] = coin(rng) ? value : -value;
            tail += value;
        }
    }

    Vector e = Vector::Zero(static_cast<Eigen::Index>(d.rows()));
    if (spec.noise > 0.0) {
        std::normal_distribution<double> normal;
        for (auto& v : e) v = normal(rng);
        e *= spec.noise / e.norm();
    }
    inst.y = d.atoms() * x + e;

    const Index g = spec.selected_prefix;
    if (g > 0) {
        // A random g-subset of the support counts as already selected; the
        // profile then holds the remaining magnitudes.
        IndexSet order(k);
        std::iota(order.begin(), order.end(), Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<bool> chosen(k, false);
        for (Index c = 0; c < g; ++c) chosen[order[c]] = true;
        std::vector<double> head;
        for (Index i = 0; i < k; ++i) {
            if (chosen[i]) {
                inst.initial.push_back(inst.support[i]);
            } else {
                head.push_back(magnitudes[i]);
            }
        }
        inst.profile.head = head;
        inst.support.erase(std::remove_if(inst.support.begin(), inst.support.end(),
                                          [&](Index a) {
                                              return std::find(inst.initial.begin(), inst.initial.end(), a) !=
                                                     inst.initial.end();
                                          }),
                           inst.support.end());
        inst.support.insert(inst.support.end(), inst.initial.begin(), inst.initial.end());
        inst.profile.selected_prefix = g;
    } else {
        inst.profile.head = magnitudes;
    }
    inst.profile.k = k;
    inst.profile.tail_l1 = tail;
    inst.profile.noise = spec.noise;
    return inst;
}

std::string describe(const IndexSet& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i] + 1);
    return out + "]";
}

// Checks the guaranteed part of a trace. For thm3 the support list holds the
// unselected atoms first (by decreasing magnitude), then the initial ones.
bool guarantee_holds(const RunTrace& trace, const Instance& inst, const ValidationSpec& spec, const Verdict& verdict) {
    const Index k = spec.k;
    std::vector<bool> in_support;
    Index max_atom = 0;
    for (Index s : inst.support) max_atom = std::max(max_atom, s);
    for (const auto& st : trace.steps) max_atom = std::max(max_atom, st.selected);
    in_support.assign(max_atom + 1, false);
    for (Index s : inst.support) in_support[s] = true;

    if (spec.theorem != "thm3") return k_step_success(trace, inst.support);

    const Index g = spec.selected_prefix;
    const Index p = spec.p.value_or(k - g);
    const Index r = spec.r.value_or(k - g);
    // Branch 2 only covers the first r iterations after the initial ones.
    const Index window = verdict.branch == 2 ? r : k - g;
    std::vector<bool> wanted(max_atom + 1, false);
    Index missing = p;
    for (Index i = 0; i < p; ++i) wanted[inst.support[i]] = true;
    for (Index step = 0; step < trace.steps.size() && step < window && missing > 0; ++step) {
        const Index a = trace.steps[step].selected;
        if (!in_support[a]) return false;
        if (wanted[a]) {
            wanted[a] = false;
            --missing;
        }
    }
    // Branch 1 guarantees the p largest are all picked; branch 2 only that
    // the picks are correct until that happens or the window closes.
    if (verdict.branch == 1) return missing == 0;
    return true;
}

} // namespace

ValidationReport validate_guarantee(const ValidationSpec& spec) {
    spec.validate();
    ValidationReport report;
    report.spec = spec;

    CertifyOptions options;
    options.variant = spec.variant;
    options.p = spec.p;
    options.r = spec.r;

    const Index n_random = spec.atoms == 0 ? spec.k + 4 : spec.atoms;
    std::optional<Dictionary> dictionary;
    if (spec.dictionary == DictionaryKind::Adversarial) dictionary = build_dictionary(spec.k, spec.mu).dictionary;

    Index dictionary_index = 0;
    for (Index trial = 0; trial < spec.trials; ++trial) {
        if (spec.dictionary == DictionaryKind::Random && trial % spec.trials_per_dictionary == 0) {
            auto rng = trial_stream(spec.seed, kValidationStream, dictionary_index++, ~std::uint64_t{0});
            dictionary = random_dictionary(spec.rows, n_random, spec.mu, rng);
            if (!dictionary) {
                report.infeasible = true;
                report.failure_details.push_back("no dictionary with coherence <= " + shortest(spec.mu) + " found");
                return report;
            }
        }
        const Dictionary& d = *dictionary;
        const double mu = d.coherence();

        auto rng = trial_stream(spec.seed, kValidationStream + 1, dictionary_index, trial);
        std::optional<Instance> inst;
        Verdict verdict;
        for (Index attempt = 0; attempt < spec.attempts_per_trial; ++attempt) {
            Instance candidate = draw_instance(d, spec, rng);
            const auto cert = certify(spec.theorem, candidate.profile, mu, options);
            verdict = cert.verdicts.at(spec.theorem);
            if (verdict.pass) {
                inst = std::move(candidate);
                break;
            }
            ++report.rejected;
        }
        if (!inst) {
            report.infeasible = true;
            report.failure_details.push_back("trial " + std::to_string(trial) + ": no certified instance within " +
                                             std::to_string(spec.attempts_per_trial) + " attempts");
            return report;
        }

        SolverConfig config;
        config.variant = spec.variant;
        config.initial_active_set = inst->initial;
        config.max_iterations = spec.k - spec.selected_prefix;
        const RunTrace trace = run_oxx(d, inst->y, config);
        ++report.certified;
        if (!guarantee_holds(trace, *inst, spec, verdict)) {
            ++report.failures;
            if (report.failure_details.size() < 20)
                report.failure_details.push_back("trial " + std::to_string(trial) + ": support " +
                                                 describe(inst->support) + ", selected " +
                                                 describe(trace.selected()));
        }
    }
    return report;
}

} // namespace greedcert
