#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "greedcert/adversarial.hpp"
#include "test_util.hpp"

using namespace greedcert;
using greedcert::testing::pinv_complement;

namespace {

bool contains(const IndexSet& s, Index i) { return std::find(s.begin(), s.end(), i) != s.end(); }

} // namespace

TEST(BuildGram, EigenvaluesMatchClosedForm) {
    for (Index k = 1; k <= 8; ++k) {
        for (double mu : {0.0, 0.5 / k, 1.0 / (k + 1), 1.0 / k}) {
            const Matrix g = build_gram(k, mu);
            Eigen::SelfAdjointEigenSolver<Matrix> es(g);
            const auto ev = es.eigenvalues();  // ascending
            EXPECT_NEAR(ev[0], 1.0 - static_cast<double>(k) * mu, 1e-12);
            for (Eigen::Index i = 1; i < ev.size(); ++i) EXPECT_NEAR(ev[i], 1.0 + mu, 1e-12);
        }
    }
    const Matrix g = build_gram(2, 0.5);
    EXPECT_NEAR(Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues()[0], 0.0, 1e-14);
    EXPECT_TRUE(build_gram(3, 0.0).isIdentity());
}

TEST(BuildGram, RejectsTooLargeCoherence) {
    try {
        build_gram(3, 0.34);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidCoherence);
    }
    EXPECT_THROW(build_gram(3, -0.1), Error);
}

TEST(BuildDictionary, GramAndCoherence) {
    for (Index k = 1; k <= 8; ++k) {
        for (double mu : {0.5 / k, 1.0 / (k + 1), 1.0 / k}) {
            const auto inst = build_dictionary(k, mu);
            EXPECT_EQ(inst.dictionary.rows(), k + 1);
            EXPECT_EQ(inst.dictionary.cols(), k + 1);
            const Matrix g = inst.dictionary.atoms().transpose() * inst.dictionary.atoms();
            EXPECT_LE((g - inst.gram_target).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_NEAR(inst.dictionary.coherence(), mu, 1e-10);
            for (Index i = 0; i <= k; ++i)
                for (Index j = 0; j <= k; ++j)
                    if (i != j) EXPECT_NEAR(inst.dictionary.atom(i).dot(inst.dictionary.atom(j)), -mu, 1e-10);
        }
    }
}

TEST(BuildDictionary, RankDeficientAtInverseK) {
    const auto inst = build_dictionary(2, 0.5);
    Eigen::JacobiSVD<Matrix> svd(inst.dictionary.atoms());
    EXPECT_NEAR(svd.singularValues()[2], 0.0, 1e-12);
    EXPECT_NEAR(inst.dictionary.coherence(), 0.5, 1e-12);
}

TEST(WorstCaseVector, Examples) {
    Vector x = worst_case_vector(3, 1, 0.2);
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_EQ(x[1], 1.0);
    EXPECT_EQ(x[2], 1.0);
    EXPECT_EQ(x[3], 0.0);
    x = worst_case_vector(3, 2, 0.25, 1.5);
    EXPECT_EQ(x[2], 1.0);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
    EXPECT_NEAR(x[0], 1.5 * 4.0 / 3.0, 1e-14);
    EXPECT_THROW(worst_case_vector(3, 3, 0.2), Error);
    EXPECT_THROW(worst_case_vector(3, 1, 0.2, 1.0), Error);
}

TEST(WorstCaseVector, NonIncreasingAtTightCoherence) {
    for (Index k = 2; k <= 8; ++k) {
        for (Index j = 1; j < k; ++j) {
            const double mu = 1.0 / (2.0 * k - j);
            for (double slack : {1.1, 1.5, 3.0}) {
                const Vector x = worst_case_vector(k, j, mu, slack);
                for (Index i = 1; i < k; ++i) EXPECT_LE(x[i], x[i - 1] * (1.0 + 1e-12));
            }
        }
    }
}

TEST(Lemma5, Examples) {
    auto inst = build_dictionary(2, 0.3);
    auto r = verify_lemma5(inst, {}, Variant::OMP);
    EXPECT_EQ(r.alpha, 1.0);
    EXPECT_NEAR(r.mu_g, 0.3, 1e-15);
    EXPECT_LE(r.max_deviation(), 1e-12);
    const IndexSet q{0};
    r = verify_lemma5(inst, q, Variant::OMP);
    EXPECT_NEAR(r.alpha, 0.91, 1e-15);
    EXPECT_NEAR(r.mu_g, 0.39, 1e-15);
    EXPECT_LE(r.max_deviation(), 1e-12);
    const auto ols = verify_lemma5(inst, q, Variant::OLS);
    EXPECT_NEAR(ols.alpha, r.alpha / std::sqrt(r.alpha), 1e-15);
    EXPECT_NEAR(ols.mu_g, r.mu_g / std::sqrt(r.alpha), 1e-15);
}

// Same quantities through an SVD pseudo-inverse projector.
TEST(Lemma5, PseudoInverseOracle) {
    for (Index k = 1; k <= 8; ++k) {
        for (double mu : {0.5 / k, 1.0 / (k + 1), 1.0 / k}) {
            const auto inst = build_dictionary(k, mu);
            for (Index g = 0; g < k; ++g) {
                IndexSet q;
                for (Index i = 0; i < g; ++i) q.push_back(i);
                const Matrix p = pinv_complement(inst.dictionary, q);
                for (Variant v : {Variant::OMP, Variant::OLS}) {
                    const double a = alpha_g(g, mu, v), m = mu_g(g, mu, v);
                    for (Index i = g; i <= k; ++i) {
                        const Vector ai = p * inst.dictionary.atom(i);
                        const Vector ci = v == Variant::OMP ? ai : Vector(ai / ai.norm());
                        EXPECT_NEAR(ci.dot(ai), a, 1e-9);
                        for (Index j = g; j <= k; ++j)
                            if (j != i) EXPECT_NEAR(ci.dot(p * inst.dictionary.atom(j)), -m, 1e-9);
                    }
                }
            }
        }
    }
}

TEST(Lemma5, MaxDeviationSweep) {
    for (Index k = 1; k <= 8; ++k)
        for (double mu : {0.5 / k, 1.0 / (k + 1), 1.0 / k})
            for (Variant v : {Variant::OMP, Variant::OLS})
                EXPECT_LE(max_lemma5_deviation(build_dictionary(k, mu), v), 1e-9);
}

TEST(Lemma5, RejectsFullSupport) {
    const auto inst = build_dictionary(2, 0.3);
    const IndexSet q{0, 1};
    EXPECT_THROW(verify_lemma5(inst, q, Variant::OMP), Error);
}

TEST(ConverseK, TieForSmallK) {
    const auto rep = demonstrate_converse_k(2);
    EXPECT_TRUE(rep.verdict);
    EXPECT_EQ(rep.steps.size(), 2u);
    for (const auto& s : rep.steps) {
        EXPECT_TRUE(contains(s.tie_set, 2));
        Index correct = 0;
        for (Index i = 0; i < 2; ++i)
            if (!contains(s.active_set, i)) correct = i;
        EXPECT_NEAR(std::abs(s.correlations.at(correct)), std::abs(s.correlations.at(2)), 1e-9);
        // Opposite signs: the two correlations cancel.
        EXPECT_NEAR(s.correlations.at(correct) + s.correlations.at(2), 0.0, 1e-9);
    }
}

TEST(ConverseK, IndependentOfCoefficients) {
    for (Variant v : {Variant::OMP, Variant::OLS}) {
        const auto flat = demonstrate_converse_k(5, v, std::vector<double>(5, 1.0));
        const auto decaying = demonstrate_converse_k(5, v, std::vector<double>{1e4, 1e3, 1e2, 10, 1});
        const auto signed_ = demonstrate_converse_k(5, v, std::vector<double>{3, -2.5, 2, -1, 0.5});
        EXPECT_TRUE(flat.verdict);
        EXPECT_TRUE(decaying.verdict);
        EXPECT_TRUE(signed_.verdict);
        EXPECT_LE(decaying.max_tie_gap, 1e-9 * 1e4);
    }
}

TEST(ConverseJ, ThreeTwo) {
    const auto rep = demonstrate_converse_j(3, 2, 1.1);
    EXPECT_TRUE(rep.verdict);
    ASSERT_EQ(rep.steps.size(), 2u);
    EXPECT_EQ(rep.steps[0].tie_set, IndexSet{0});
    EXPECT_TRUE(contains(rep.steps[1].tie_set, 1));
    EXPECT_TRUE(contains(rep.steps[1].tie_set, 3));
    ASSERT_TRUE(rep.certificate.has_value());
    EXPECT_TRUE(rep.certificate->boundary);
    EXPECT_EQ(rep.certificate->binding_index, 2u);
}

TEST(ConverseJ, FirstStepTie) {
    const auto rep = demonstrate_converse_j(5, 1);
    EXPECT_TRUE(rep.verdict);
    EXPECT_NEAR(rep.mu, 1.0 / 9.0, 1e-16);
    ASSERT_EQ(rep.steps.size(), 1u);
    EXPECT_TRUE(contains(rep.steps[0].tie_set, 0));
    EXPECT_TRUE(contains(rep.steps[0].tie_set, 5));
}

TEST(ConverseJ, SweepBothVariants) {
    for (Index k = 2; k <= 6; ++k)
        for (Index j = 1; j < k; ++j)
            for (double slack : {1.1, 1.5, 3.0})
                for (Variant v : {Variant::OMP, Variant::OLS}) {
                    const auto rep = demonstrate_converse_j(k, j, slack, v, false);
                    EXPECT_TRUE(rep.verdict) << k << " " << j << " " << slack;
                    for (Index g = 0; g + 1 < j; ++g) EXPECT_EQ(rep.steps[g].tie_set, IndexSet{g});
                    EXPECT_GE(rep.steps.back().tie_set.size(), 2u);
                }
}

TEST(ConverseJ, OlsScoresAreScaledOmpScores) {
    const auto omp = demonstrate_converse_j(4, 3, 1.5, Variant::OMP);
    const auto ols = demonstrate_converse_j(4, 3, 1.5, Variant::OLS);
    ASSERT_EQ(omp.steps.size(), ols.steps.size());
    for (std::size_t s = 0; s < omp.steps.size(); ++s) {
        const double scale = 1.0 / std::sqrt(alpha_g(omp.steps[s].g, omp.mu, Variant::OMP));
        EXPECT_EQ(omp.steps[s].tie_set, ols.steps[s].tie_set);
        for (auto [i, c] : omp.steps[s].correlations) EXPECT_NEAR(ols.steps[s].correlations.at(i), c * scale, 1e-10);
    }
}

TEST(ConverseJ, InvalidArguments) {
    EXPECT_THROW(demonstrate_converse_j(3, 3), Error);
    EXPECT_THROW(demonstrate_converse_j(1, 1), Error);
    EXPECT_THROW(demonstrate_converse_k(0), Error);
}
