#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "eqkd/error.hpp"
#include "eqkd/states.hpp"
#include "oracle/dense.hpp"

using namespace eqkd;

namespace {

double dense_overlap(const Register& r, const dense::Vec& v) {
    std::complex<double> ip = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) ip += std::conj(v[i]) * r.amplitudes()[i];
    return std::abs(ip);
}

dense::Vec act(const dense::Mat& m, const dense::Vec& v) {
    dense::Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) r[i] += m(i, j) * v[j];
    return r;
}

}  // namespace

TEST(Identities, CatalogueHasTenEntriesAndAllPass) {
    const auto t0 = std::chrono::steady_clock::now();
    const IdentityReport rep = verify_identities();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_EQ(rep.entries.size(), 10U);
    for (const auto& e : rep.entries) {
        EXPECT_TRUE(e.pass) << e.name;
        EXPECT_LE(e.overlap_deficit, 1e-12) << e.name;
    }
    EXPECT_TRUE(rep.all_pass());
    EXPECT_LT(secs, 1.0);
}

TEST(Identities, FlippedHanSignIsCaught) {
    IdentityOptions opt;
    opt.flip_han_vvh_sign = true;
    const IdentityReport rep = verify_identities(opt);
    EXPECT_FALSE(rep.all_pass());
    int failing = 0;
    for (const auto& e : rep.entries) {
        if (!e.pass) {
            ++failing;
            EXPECT_EQ(e.name, "han_state_factored");
        }
    }
    EXPECT_EQ(failing, 1);
}

TEST(Identities, FromKetsRejectsUnnormalizedPrefactor) {
    try {
        from_kets({"A", "B"}, {{1.0, "00"}, {1.0, "11"}});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotNormalizable);
    }
    EXPECT_NO_THROW(from_kets_normalized({"A", "B"}, {{1.0, "00"}, {1.0, "11"}}));
}

// Each named state against an independent dense transcription.

TEST(NamedStates, MatchDenseTranscriptions) {
    using dense::add, dense::ket, dense::scale, dense::kS;
    const struct {
        NamedState s;
        dense::Vec v;
    } cases[] = {
        {NamedState::PhiPlusAB, scale(add(ket("00"), ket("11")), kS)},
        {NamedState::PhiMinusAB, scale(add(ket("00"), ket("11"), -1.0), kS)},
        {NamedState::PhiMinusHadamard, scale(add(ket("++"), ket("--"), -1.0), kS)},
        {NamedState::PhiMinusXForm, scale(add(ket("+-"), ket("-+")), kS)},
        {NamedState::Omega1, scale(add(ket("+-1"), ket("-+0")), kS)},
        {NamedState::Omega2, scale(add(ket("011"), ket("100")), kS)},
        {NamedState::HanABC, scale(add(add(ket("000"), ket("011")), add(ket("101"), ket("110"), -1.0)), 0.5)},
        {NamedState::Psi1, scale(add(ket("0+0"), ket("1-1")), kS)},
        {NamedState::Psi2, scale(add(ket("0-0"), ket("1+1")), kS)},
        {NamedState::GhzPlus, scale(add(ket("000"), ket("111")), kS)},
    };
    for (const auto& c : cases) {
        EXPECT_NEAR(dense_overlap(named_state(c.s), c.v), 1.0, 1e-12) << named_state_name(c.s);
    }
}

TEST(DenseCheck, HadamardsTurnPhiMinusIntoPsiPlus) {
    // The printed sign of (|++> - |-->)/sqrt2 is right: it equals psi+.
    using dense::add, dense::ket, dense::scale, dense::kS;
    const dense::Mat hh = dense::kron(dense::H(), dense::H());
    const auto lhs = act(hh, scale(add(ket("00"), ket("11"), -1.0), kS));
    const auto psi_plus = scale(add(ket("01"), ket("10")), kS);
    const auto printed = scale(add(ket("++"), ket("--"), -1.0), kS);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(std::abs(lhs[i] - psi_plus[i]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(lhs[i] - printed[i]), 0.0, 1e-12);
    }
}

TEST(DenseCheck, XControlledCnotProducesOmegaStates) {
    using dense::add, dense::ket, dense::scale, dense::kS;
    const dense::Mat hb = dense::on(3, 1, dense::H());
    const dense::Mat u = dense::mul(hb, dense::mul(dense::cnot(3, 1, 2), hb));
    const auto omega1 = act(u, scale(add(ket("000"), ket("110"), -1.0), kS));
    EXPECT_NEAR(dense_overlap(named_state(NamedState::Omega1), omega1), 1.0, 1e-12);
    const auto omega2 = act(dense::mul(dense::on(3, 0, dense::H()), hb), omega1);
    EXPECT_NEAR(dense_overlap(named_state(NamedState::Omega2), omega2), 1.0, 1e-12);

    // A textbook (Z-control) CNOT does not give Omega1.
    const auto z_version = act(dense::cnot(3, 1, 2), scale(add(ket("000"), ket("110"), -1.0), kS));
    EXPECT_LT(dense_overlap(named_state(NamedState::Omega1), z_version), 0.9);
}

TEST(DenseCheck, PrintedXExpansionPrefactorHasNormSqrtTwo) {
    using dense::add, dense::ket, dense::scale, dense::kS;
    const auto printed = scale(add(add(ket("+0+"), ket("+1-")), add(ket("-0-"), ket("-1+"))), kS);
    double n2 = 0.0;
    for (auto a : printed) n2 += std::norm(a);
    EXPECT_NEAR(n2, 2.0, 1e-12);
}
