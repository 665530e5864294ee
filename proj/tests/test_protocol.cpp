#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "walkport/oracle.hpp"
#include "walkport/protocol.hpp"

using namespace walkport;

namespace {

SecretSpec random_secret(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double chi = angle(rng) / 4.0;
    return SecretSpec(std::polar(std::cos(chi), angle(rng)), std::polar(std::sin(chi), angle(rng)));
}

StateVector single_qubit_secret(const SecretSpec& secret, const Slot& slot) {
    SlotSpace space({slot}, {2});
    return StateVector::with_terms(space, {{{0}, secret.alpha}, {{1}, secret.beta}});
}

}  // namespace

TEST_CASE("prepare_shared_secret") {
    SECTION("basis-state secret is a single term") {
        const SystemShape shape(2, 2);
        const auto psi = prepare_shared_secret(SecretSpec(cplx{1.0, 0.0}, cplx{0.0, 0.0}), shape);
        REQUIRE(psi.support_size() == 1);
        BasisState zero{{0, 0}, {0, 0, 0, 0}};
        REQUIRE(psi.amplitude(shape.digits_of(zero)) == cplx{1.0, 0.0});
    }

    SECTION("balanced secret splits into two equal branches") {
        const SystemShape shape(3, 2);
        const double s = 1.0 / std::numbers::sqrt2;
        const auto psi = prepare_shared_secret(SecretSpec(cplx{s, 0.0}, cplx{s, 0.0}), shape);
        REQUIRE(psi.support_size() == 2);
        BasisState ones{{0, 0, 0}, {1, 1, 1, 0, 0}};
        REQUIRE(std::abs(psi.amplitude(shape.digits_of(ones)) - cplx{s, 0.0}) < norm_tol);
        REQUIRE(std::abs(psi.norm() - 1.0) < norm_tol);
    }

    SECTION("general secret keeps the two amplitudes") {
        const SystemShape shape(2, 3);
        const SecretSpec secret(cplx{0.6, 0.0}, cplx{0.0, 0.8});
        const auto psi = prepare_shared_secret(secret, shape);
        REQUIRE(psi.support_size() == 2);
        BasisState zeros{{0, 0}, {0, 0, 0, 0, 0}};
        REQUIRE(psi.amplitude(shape.digits_of(zeros)) == secret.alpha);
    }

    SECTION("an unnormalized secret is rejected") {
        REQUIRE_THROWS_AS(SecretSpec(cplx{1.0, 0.0}, cplx{0.5, 0.0}), Error);
    }
}

TEST_CASE("omega parity") {
    OutcomeRecord rec;

    SECTION("homogeneous parity ignores walker 1's label") {
        rec.p1 = {1, 1};
        rec.p_bits = {0};
        rec.c_bits = {0, 0};
        REQUIRE(compute_omega(Variant::homogeneous, rec) == 0);
        rec.p_bits = {1};
        rec.c_bits = {1, 0};
        REQUIRE(compute_omega(Variant::homogeneous, rec) == 0);
        rec.c_bits = {1, 1};
        REQUIRE(compute_omega(Variant::homogeneous, rec) == 1);
    }

    SECTION("position-dependent parity includes walker 1's bit") {
        rec.p1 = {1, 0};
        rec.p_bits = {0};
        rec.c_bits = {1, 0};
        REQUIRE(compute_omega(Variant::position_dependent, rec) == 0);
        rec.p1 = {0, 0};
        REQUIRE(compute_omega(Variant::position_dependent, rec) == 1);
    }

    SECTION("three-sender example") {
        rec.p1 = {0, 1};
        rec.p_bits = {1, 0};
        rec.c_bits = {1, 1, 0};
        REQUIRE(compute_omega(Variant::homogeneous, rec) == 1);
    }
}

TEST_CASE("correction plans") {
    OutcomeRecord rec;
    rec.p1 = {0, 0};

    SECTION("position-dependent, even parity: nobody acts") {
        rec.p_bits = {0};
        rec.c_bits = {0, 0};
        const auto plan = correction_plan(Variant::position_dependent, rec, 1, 2);
        REQUIRE(plan.per_receiver == std::vector<PauliOp>{PauliOp::identity, PauliOp::identity});
    }

    SECTION("position-dependent, odd parity: one sigma_z") {
        rec.p_bits = {1};
        rec.c_bits = {0, 0};
        const auto plan = correction_plan(Variant::position_dependent, rec, 2, 2);
        REQUIRE(plan.per_receiver == std::vector<PauliOp>{PauliOp::identity, PauliOp::pauli_z});
    }

    SECTION("homogeneous, odd parity, receiver 2 designated") {
        rec.p_bits = {1};
        rec.c_bits = {0, 0};
        const auto plan = correction_plan(Variant::homogeneous, rec, 2, 2);
        REQUIRE(plan.per_receiver == std::vector<PauliOp>{PauliOp::pauli_z, PauliOp::pauli_zx});
    }

    SECTION("homogeneous, even parity, receiver 1 designated, m=3") {
        rec.p_bits = {0};
        rec.c_bits = {0, 0};
        const auto plan = correction_plan(Variant::homogeneous, rec, 1, 3);
        REQUIRE(plan.per_receiver ==
                std::vector<PauliOp>{PauliOp::pauli_x, PauliOp::identity, PauliOp::identity});
    }
}

TEST_CASE("position-dependent protocol teleports every outcome") {
    std::mt19937_64 rng(61);
    for (int n = 1; n <= 3; ++n)
        for (int m = 2; m <= 3; ++m) {
            ProtocolConfig config{n, m, Variant::position_dependent};
            const SecretSpec secret = random_secret(rng);
            const auto result = run_protocol(config, secret);
            REQUIRE(result.outcomes.size() == (1ull << (2 * n)));
            REQUIRE(std::abs(result.probability_sum - 1.0) < compare_tol);
            REQUIRE(result.min_fidelity > 1.0 - compare_tol);

            // corrected states really are the aligned m-qubit secret
            const auto target = oracle::ghz_secret(secret, config.shape().receiver_space());
            for (const auto& v : result.outcomes) REQUIRE(fidelity(v.corrected, target) > 1.0 - compare_tol);
        }
}

TEST_CASE("homogeneous protocol reaches its per-outcome targets for every designated receiver") {
    std::mt19937_64 rng(67);
    for (int n = 1; n <= 2; ++n)
        for (int m = 2; m <= 3; ++m) {
            const SecretSpec secret = random_secret(rng);
            for (int j = 1; j <= m; ++j) {
                ProtocolConfig config{n, m, Variant::homogeneous, j};
                const auto result = run_protocol(config, secret);
                REQUIRE(std::abs(result.probability_sum - 1.0) < compare_tol);
                REQUIRE(result.min_fidelity > 1.0 - compare_tol);
            }
        }
}

TEST_CASE("degenerate secrets pass end to end") {
    for (Variant variant : {Variant::homogeneous, Variant::position_dependent}) {
        ProtocolConfig config{2, 2, variant};
        const auto result = run_protocol(config, SecretSpec(cplx{1.0, 0.0}, cplx{0.0, 0.0}));
        REQUIRE(result.min_fidelity > 1.0 - compare_tol);
    }
}

TEST_CASE("rotation-style correction variant verifies against its own targets") {
    std::mt19937_64 rng(71);
    for (int m = 2; m <= 3; ++m) {
        ProtocolConfig config{2, m, Variant::homogeneous, 1, CorrectionStyle::rz_alternative};
        const auto result = run_protocol(config, random_secret(rng));
        REQUIRE(result.min_fidelity > 1.0 - compare_tol);
    }
}

TEST_CASE("flipping one helper bit flips the parity and the beta-sector sign") {
    const SystemShape shape(2, 2);
    const SecretSpec secret(cplx{0.6, 0.0}, cplx{0.48, 0.64});
    for (Variant variant : {Variant::homogeneous, Variant::position_dependent}) {
        ProtocolConfig config{2, 2, variant};
        const auto evolved = evolve(config, secret);
        const auto results = measure_all(evolved, shape, protocol_bases(variant, shape), MeasureMode::enumerate_all);

        auto find = [&](const BasisLabel& p1, int p2, int c1, int c2) -> const MeasurementResult& {
            for (const auto& r : results)
                if (r.outcome.p1 == p1 && r.outcome.p_bits[0] == p2 && r.outcome.c_bits[0] == c1 &&
                    r.outcome.c_bits[1] == c2)
                    return r;
            FAIL("outcome not found");
            return results.front();
        };

        for (const auto& base : results) {
            const auto& flipped = find(base.outcome.p1, base.outcome.p_bits[0] ^ 1, base.outcome.c_bits[0],
                                       base.outcome.c_bits[1]);
            REQUIRE(compute_omega(variant, base.outcome) != compute_omega(variant, flipped.outcome));
            // the beta sector flips sign: Z on every receiver (homogeneous) or
            // Z on one receiver (position-dependent) maps one residual to the other
            StateVector mapped = base.residual;
            const Mat2 z = mat2_pauli_z();
            if (variant == Variant::homogeneous) {
                for (int r = 1; r <= 2; ++r)
                    mapped = apply_local(mapped, shape.receiver_coin(r), std::span<const cplx>(z.u.data(), 4));
            } else {
                mapped = apply_local(mapped, shape.receiver_coin(1), std::span<const cplx>(z.u.data(), 4));
            }
            REQUIRE(fidelity(mapped, flipped.residual) > 1.0 - compare_tol);
        }
    }
}

TEST_CASE("reconstruct_secret decodes every outcome class") {
    std::mt19937_64 rng(73);
    for (Variant variant : {Variant::homogeneous, Variant::position_dependent}) {
        for (int m = 2; m <= 3; ++m) {
            const SecretSpec secret = random_secret(rng);
            for (int j = 1; j <= m; ++j) {
                ProtocolConfig config{2, m, variant, j};
                const SystemShape shape = config.shape();
                const auto result = run_protocol(config, secret);
                const auto phi = single_qubit_secret(secret, shape.receiver_coin(j));
                for (const auto& v : result.outcomes) {
                    for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
                        std::vector<int> helper_bits;
                        for (int b = 0; b < m - 1; ++b) helper_bits.push_back((mask >> b) & 1u);
                        const auto decoded =
                            reconstruct_secret(v.corrected, variant, v.outcome, j, helper_bits, shape);
                        REQUIRE(fidelity(decoded, phi) > 1.0 - compare_tol);
                    }
                }
            }
        }
    }
}

TEST_CASE("sample mode verifies a single outcome deterministically") {
    ProtocolConfig config{2, 2, Variant::homogeneous};
    const SecretSpec secret(cplx{0.6, 0.0}, cplx{0.48, 0.64});
    const auto a = run_protocol(config, secret, MeasureMode::sample_one, 9001);
    const auto b = run_protocol(config, secret, MeasureMode::sample_one, 9001);
    REQUIRE(a.outcomes.size() == 1);
    REQUIRE(a.min_fidelity > 1.0 - compare_tol);
    REQUIRE(a.outcomes[0].outcome.p1 == b.outcomes[0].outcome.p1);
    REQUIRE(a.outcomes[0].outcome.p_bits == b.outcomes[0].outcome.p_bits);
    REQUIRE(a.outcomes[0].outcome.c_bits == b.outcomes[0].outcome.c_bits);
}

TEST_CASE("config validation") {
    ProtocolConfig config{0, 2, Variant::homogeneous};
    REQUIRE_THROWS_AS(config.validate(), Error);
    config = {2, 1, Variant::homogeneous};
    REQUIRE_THROWS_AS(config.validate(), Error);
    config = {2, 2, Variant::homogeneous, 3};
    REQUIRE_THROWS_AS(config.validate(), Error);
}

TEST_CASE("circuit step list pairs coins with their walkers") {
    ProtocolConfig config{2, 3, Variant::homogeneous};
    const auto steps = circuit_steps(config);
    const SystemShape shape = config.shape();
    REQUIRE(steps.size() == 5);    // n stage-one steps + m stage-two steps
    REQUIRE(steps[0].active_coin == shape.first_coin(1));
    REQUIRE(steps[0].shifted_walker == 1);
    REQUIRE(steps[1].active_coin == shape.first_coin(2));
    REQUIRE(steps[1].shifted_walker == 2);
    for (std::size_t k = 2; k < steps.size(); ++k) REQUIRE(steps[k].shifted_walker == 1);
}
