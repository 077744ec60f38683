#include <doctest.h>

#include "ncofdm/fd_precoder.hpp"
#include "ncofdm/transmitter.hpp"
#include "test_util.hpp"

using namespace ncofdm;

TEST_SUITE("fd_precoder")
{
    TEST_CASE("scaled projection is idempotent, Hermitian and has trace V+1")
    {
        for (int K : {8, 64, 256}) {
            for (int V = 0; V <= 4; ++V) {
                if (V + 1 > K)
                    continue;
                const SystemConfig cfg = build_system_config(K, 4 * K, K / 4, V);
                const PrecoderMatrices pm = build_P(cfg);
                CAPTURE(K);
                CAPTURE(V);
                const double idem = (pm.P * pm.P - pm.P).norm() / pm.P.norm();
                CHECK(idem < 1e-8);
                CHECK(std::abs(pm.P.trace() - cplx(V + 1, 0.0)) < 1e-8);
                CHECK((pm.P - pm.P.adjoint()).norm() / pm.P.norm() < 1e-12);
            }
        }
    }

    TEST_CASE("row scaling of the constraint matrix")
    {
        const SystemConfig cfg = build_system_config(8, 32, 4, 2);
        const RMatrix A = build_A(cfg);
        const RMatrix U = build_A(cfg, RowScaling::Unscaled);
        // Subcarrier -4 is the first column.
        CHECK(U(2, 0) == doctest::Approx(16.0));
        CHECK(A(2, 0) == doctest::Approx(1.0));
        CHECK(A(1, 7) == doctest::Approx(3.0 * 2.0 / 8.0));
        const PrecoderMatrices ps = build_P(cfg);
        const PrecoderMatrices pu = build_P(cfg, RowScaling::Unscaled);
        CHECK(ps.gram_condition < pu.gram_condition);
        CHECK((ps.P - pu.P).norm() < 1e-10);
    }

    TEST_CASE("unscaled constraints at V=4, K=256 are flagged as ill-conditioned")
    {
        const SystemConfig cfg = build_system_config(256, 2048, 144, 4);
        CHECK_THROWS_AS(build_P(cfg, RowScaling::Unscaled), NumericError);
        CHECK(build_P(cfg).gram_condition < 1e8);
    }

    TEST_CASE("precoded symbols satisfy the edge constraints")
    {
        const SystemConfig cfg = build_system_config(64, 256, 18, 3);
        const Payload p = random_payload(cfg, 6, 21);
        FdPrecoder pre(cfg);
        const PrecoderMatrices& pm = pre.matrices();
        FreqSymbol prev = pre.step(p.symbols[0]);
        CHECK(prev.values == p.symbols[0].values);
        for (std::size_t i = 1; i < p.symbols.size(); ++i) {
            const FreqSymbol cur = pre.step(p.symbols[i]);
            const CVector lhs = pm.A.cast<cplx>() * pm.phi_diag.cwiseProduct(cur.values);
            const CVector rhs = pm.A.cast<cplx>() * prev.values;
            CHECK(testutil::max_abs(lhs - rhs) < 1e-12);
            prev = cur;
        }
        pre.reset();
        CHECK(pre.step(p.symbols[3]).values == p.symbols[3].values);
    }

    TEST_CASE("dimension mismatches are rejected")
    {
        const SystemConfig cfg = build_system_config(8, 32, 4, 1);
        const PrecoderMatrices pm = build_P(cfg);
        CHECK_THROWS_AS(fd_precode_step(pm, FreqSymbol{CVector::Zero(7)}, std::nullopt), ConfigError);
        CHECK_THROWS_AS(fd_precode_step(pm, FreqSymbol::zeros(cfg), FreqSymbol{CVector::Zero(3)}),
                        ConfigError);
    }
}
