#include <gtest/gtest.h>

#include <cmath>

#include "eqkd/adversary.hpp"
#include "eqkd/error.hpp"
#include "eqkd/protocols.hpp"
#include "eqkd/states.hpp"

using namespace eqkd;

TEST(InterceptResend, ZOnPhiPlusWithRemapGivesZeroPlusOrOneMinus) {
    Prng rng(21);
    for (int i = 0; i < 50; ++i) {
        Register r = named_state(NamedState::PhiPlusAB);
        EveRoundRecord rec;
        const int out = eve_intercept_resend(r, "B", BasisPolicy::AlwaysZ, ResendPolicy::PaperXRemap, rng, rec);
        const auto expected = from_kets({"A", "B"}, {{1.0, out ? "1-" : "0+"}});
        EXPECT_TRUE(states_equal_up_to_phase(r, expected));
        EXPECT_EQ(rec.choice(), "Z");
    }
}

TEST(InterceptResend, XOnPhiMinusGivesAntiCorrelatedXStates) {
    Prng rng(22);
    int plus_minus = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        Register r = named_state(NamedState::PhiMinusAB);
        EveRoundRecord rec;
        const int out =
            eve_intercept_resend(r, "B", BasisPolicy::AlwaysX, ResendPolicy::AsMeasuredEigenstate, rng, rec);
        const auto expected = from_kets({"A", "B"}, {{1.0, out ? "+-" : "-+"}});
        ASSERT_TRUE(states_equal_up_to_phase(r, expected));
        plus_minus += out;
    }
    EXPECT_NEAR(static_cast<double>(plus_minus) / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(CollectiveCnot, AncillaOnPhiMinusMatchesOmega1) {
    Register r = named_state(NamedState::PhiMinusAB);
    EveRoundRecord rec;
    EXPECT_EQ(eve_collective_cnot(r, "B", Basis::X, rec), "E");
    EXPECT_TRUE(states_equal_up_to_phase(r, named_state(NamedState::Omega1)));
    Register r2 = named_state(NamedState::Psi1);
    EveRoundRecord rec2;
    eve_collective_cnot(r2, "B", Basis::X, rec2);
    EXPECT_EQ(eve_collective_cnot(r2, "C", Basis::X, rec2), "E2");
}

TEST(CollectiveCnot, UnknownLabel) {
    Register r = named_state(NamedState::PhiMinusAB);
    EveRoundRecord rec;
    EXPECT_THROW(eve_collective_cnot(r, "Q", Basis::X, rec), Error);
}

TEST(BellIntercept, OutcomesOnPsi1AreUniform) {
    for (NamedState s : {NamedState::Psi1, NamedState::Psi2}) {
        const auto p = named_state(s).bell_probabilities("B", "C");
        for (double v : p) EXPECT_NEAR(v, 0.25, 1e-12);
    }
}

TEST(BellIntercept, GuessMapIsExactForPsi1AndInvertedForPsi2) {
    // Psi1 = [|+>(phi- + psi+) + |->(phi+ - psi-)]/2
    // Psi2 = [|+>(phi+ + psi-) + |->(phi- - psi+)]/2
    // Without knowing which was prepared, the guess is right half the time.
    for (BellOutcome b : kBellOutcomes) {
        const int guess = bell_guess_for_alice_x(b);
        Register r1 = named_state(NamedState::Psi1);
        r1.project_bell("B", "C", b);
        EXPECT_NEAR(r1.probability("A", Basis::X, guess), 1.0, 1e-12) << bell_name(b);
        Register r2 = named_state(NamedState::Psi2);
        r2.project_bell("B", "C", b);
        EXPECT_NEAR(r2.probability("A", Basis::X, guess), 0.0, 1e-12) << bell_name(b);
    }
}

TEST(Eavesdropper, NoneHasEmptyHookAndNeverDraws) {
    Prng rng(4);
    Eavesdropper eve(EveStrategy::none(), rng);
    EXPECT_FALSE(static_cast<bool>(eve.hook()));
    Register r = named_state(NamedState::PhiPlusAB);
    const auto slot = eve.begin_round(0);
    eve.after_announcement(r, false, slot);
    EXPECT_TRUE(eve.record().rounds[0].outcomes.empty());
}

TEST(Eavesdropper, NoneRunIsReproducibleAndLeavesNoTrace) {
    SessionConfig cfg;
    cfg.rounds = 200;
    cfg.seed = 77;
    const RunResult a = run_protocol(cfg);
    const RunResult b = run_protocol(cfg);
    EXPECT_EQ(traces_to_csv(a.traces), traces_to_csv(b.traces));
    EXPECT_EQ(a.final_keys, b.final_keys);
    for (const auto& t : a.traces) EXPECT_TRUE(t.eve_choice.empty());
}

TEST(Eavesdropper, CnotAncillaMeasuredInXAfterHadamardRound) {
    Prng rng(8);
    Eavesdropper eve(EveStrategy::collective_cnot(), rng);
    const auto hook = eve.hook();
    Register r = named_state(NamedState::PhiMinusAB);
    const auto slot = eve.begin_round(0);
    const std::vector<std::string> sent{"B"};
    hook(r, sent);
    eve.after_announcement(r, true, slot);
    ASSERT_EQ(eve.record().rounds[0].outcomes.size(), 1U);
    EXPECT_TRUE(eve.record().rounds[0].guess.has_value());
}

TEST(HanDemo, PerfectGuessNoDetection) {
    Prng rng(2024);
    const auto rep = han_attack_demo(10000, rng);
    EXPECT_EQ(rep.bell_counts[1], 0U);
    EXPECT_EQ(rep.bell_counts[2], 0U);
    const double sigma = std::sqrt(0.25 / 10000);
    EXPECT_NEAR(rep.bell_counts[0] / 10000.0, 0.5, 3 * sigma);
    EXPECT_NEAR(rep.bell_counts[3] / 10000.0, 0.5, 3 * sigma);
    EXPECT_EQ(rep.guess_accuracy, 1.0);
    EXPECT_EQ(rep.detection_events, 0U);
}

TEST(HanDemo, SingleRoundAndZeroRounds) {
    Prng rng(1);
    EXPECT_EQ(han_attack_demo(1, rng).rounds, 1U);
    EXPECT_THROW(han_attack_demo(0, rng), Error);
}

TEST(HanDemo, ExactBellProbabilities) {
    const auto p = named_state(NamedState::HanABC).bell_probabilities("2", "3");
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_NEAR(p[3], 0.5, 1e-12);
    EXPECT_NEAR(p[1] + p[2], 0.0, 1e-12);
}

TEST(Strategy, Names) {
    EXPECT_EQ(EveStrategy::none().name(), "none");
    EXPECT_EQ(EveStrategy::intercept_resend().name(), "intercept-resend(random,x-remap)");
    EXPECT_EQ(EveStrategy::intercept_resend(BasisPolicy::AlwaysZ, ResendPolicy::AsMeasuredEigenstate).name(),
              "intercept-resend(z,eigenstate)");
    EXPECT_EQ(EveStrategy::collective_cnot(Basis::Z).name(), "cnot(z)");
    EXPECT_EQ(EveStrategy::bell_intercept().name(), "bell");
}
