#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "walkport/oracle.hpp"
#include "walkport/protocol.hpp"
#include "walkport/walk.hpp"

using namespace walkport;

namespace {

StateVector random_interior_state(const SystemShape& shape, std::mt19937_64& rng, int support, int walker1_margin,
                                  bool pin_secondary_to_origin) {
    // keeps walker 1 `walker1_margin` sites away from the truncation edge so
    // that many conditional shifts stay in range
    const SlotSpace space = shape.full_space();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::uint64_t> pick(0, space.total_dim() - 1);
    const int p1 = space.find(shape.position(1));
    const int bound = shape.position_bound(1);
    StateVector psi(space);
    while (psi.support_size() < static_cast<std::size_t>(support)) {
        std::uint64_t idx = pick(rng);
        const int pos = space.digit_at(idx, p1) - bound;
        if (std::abs(pos) > bound - walker1_margin) continue;
        if (pin_secondary_to_origin)
            for (int k = 2; k <= shape.walkers(); ++k) idx = space.with_digit(idx, space.find(shape.position(k)), 1);
        psi.add_term(idx, cplx{gauss(rng), gauss(rng)});
    }
    return psi.normalized();
}

Mat2 random_unitary(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double t = angle(rng) / 4.0;
    const double a = angle(rng), b = angle(rng);
    Mat2 u;
    u.u = {std::polar(std::cos(t), a), std::polar(std::sin(t), b),
           std::polar(-std::sin(t), -b), std::polar(std::cos(t), -a)};
    return u;
}

SecretSpec random_secret(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double chi = angle(rng) / 4.0;
    return SecretSpec(std::polar(std::cos(chi), angle(rng)), std::polar(std::sin(chi), angle(rng)));
}

}  // namespace

TEST_CASE("coin application") {
    SlotSpace one({coin_slot(0)}, {2});

    SECTION("Hadamard on |0>") {
        auto psi = apply_coin(StateVector::basis_state(one, std::vector<int>{0}), coin_slot(0), CoinRule::hadamard());
        const double s = 1.0 / std::numbers::sqrt2;
        REQUIRE(std::abs(psi.amplitude(std::vector<int>{0}) - cplx{s, 0.0}) < norm_tol);
        REQUIRE(std::abs(psi.amplitude(std::vector<int>{1}) - cplx{s, 0.0}) < norm_tol);
    }

    SECTION("identity leaves any state alone") {
        SlotSpace pair({position_slot(1), coin_slot(0)}, {7, 2});
        auto psi = StateVector::with_terms(pair, {{{2, 0}, cplx{0.6, 0.0}}, {{5, 1}, cplx{0.0, 0.8}}});
        auto out = apply_coin(psi, coin_slot(0), CoinRule::identity());
        REQUIRE(max_term_distance(psi, out) == 0.0);
    }

    SECTION("position-dependent table selects by the key register") {
        SlotSpace pair({position_slot(1), coin_slot(0)}, {7, 2});
        const cplx alpha{0.6, 0.0}, beta{0.8, 0.0};
        // alpha at position +1, beta at position -1, both coin 0
        auto psi = StateVector::with_terms(pair, {{{4, 0}, alpha}, {{2, 0}, beta}});
        auto rule = CoinRule::position_dependent({{1, mat2_identity()}, {-1, mat2_pauli_x()}});
        auto out = apply_coin(psi, coin_slot(0), rule, position_slot(1));
        REQUIRE(std::abs(out.amplitude(std::vector<int>{4, 0}) - alpha) < norm_tol);
        REQUIRE(std::abs(out.amplitude(std::vector<int>{2, 1}) - beta) < norm_tol);
        REQUIRE(out.support_size() == 2);
    }

    SECTION("missing table entry without a default is an error") {
        SlotSpace pair({position_slot(1), coin_slot(0)}, {7, 2});
        auto psi = StateVector::basis_state(pair, std::vector<int>{3, 0});    // position 0 unlisted
        auto rule = CoinRule::position_dependent({{1, mat2_identity()}, {-1, mat2_pauli_x()}});
        REQUIRE_THROWS_AS(apply_coin(psi, coin_slot(0), rule, position_slot(1)), Error);
    }

    SECTION("a non-unitary table is rejected at construction") {
        Mat2 bad;
        bad.u = {cplx{1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
        REQUIRE_THROWS_AS(CoinRule::position_dependent({{0, bad}}), Error);
    }
}

TEST_CASE("conditional shift") {
    SlotSpace pair({position_slot(1), coin_slot(0)}, {7, 2});

    SECTION("coin 0 steps up") {
        auto psi = apply_conditional_shift(StateVector::basis_state(pair, std::vector<int>{3, 0}), position_slot(1),
                                           coin_slot(0));
        REQUIRE(psi.amplitude(std::vector<int>{4, 0}) == cplx{1.0, 0.0});
    }

    SECTION("superposed coin splits the walker") {
        const cplx alpha{0.6, 0.0}, beta{0.0, 0.8};
        auto psi = StateVector::with_terms(pair, {{{3, 0}, alpha}, {{3, 1}, beta}});
        auto out = apply_conditional_shift(psi, position_slot(1), coin_slot(0));
        REQUIRE(std::abs(out.amplitude(std::vector<int>{4, 0}) - alpha) < norm_tol);
        REQUIRE(std::abs(out.amplitude(std::vector<int>{2, 1}) - beta) < norm_tol);
    }

    SECTION("double application with coin 0 moves two sites") {
        auto psi = StateVector::basis_state(pair, std::vector<int>{3, 0});
        auto out = apply_conditional_shift(apply_conditional_shift(psi, position_slot(1), coin_slot(0)),
                                           position_slot(1), coin_slot(0));
        REQUIRE(out.amplitude(std::vector<int>{5, 0}) == cplx{1.0, 0.0});
    }

    SECTION("stepping out of range reports a sizing error") {
        auto psi = StateVector::basis_state(pair, std::vector<int>{6, 0});
        REQUIRE_THROWS_AS(apply_conditional_shift(psi, position_slot(1), coin_slot(0)), Error);
    }
}

TEST_CASE("stage one turns the shared secret into correlated single steps") {
    const SystemShape shape(2, 2);
    const cplx alpha{0.6, 0.0}, beta{0.8, 0.0};
    const auto start = prepare_shared_secret(SecretSpec(alpha, beta), shape);
    const auto rules = homogeneous_rules(2, CoinRule::identity());
    const auto out = stage_one(start, shape, rules);

    SECTION("identity coins give the two-branch stepped state") {
        REQUIRE(out.support_size() == 2);
        BasisState up{{1, 1}, {0, 0, 0, 0}};
        BasisState down{{-1, -1}, {1, 1, 0, 0}};
        REQUIRE(std::abs(out.amplitude(shape.digits_of(up)) - alpha) < norm_tol);
        REQUIRE(std::abs(out.amplitude(shape.digits_of(down)) - beta) < norm_tol);
    }

    SECTION("a basis-state secret stays a product state") {
        const auto single = stage_one(prepare_shared_secret(SecretSpec(cplx{1.0, 0.0}, cplx{0.0, 0.0}), shape),
                                      shape, rules);
        REQUIRE(single.support_size() == 1);
        BasisState up{{1, 1}, {0, 0, 0, 0}};
        REQUIRE(std::abs(single.amplitude(shape.digits_of(up)) - cplx{1.0, 0.0}) < norm_tol);
    }
}

TEST_CASE("stage one with Hadamard first coins matches the dense reference") {
    // n=2: the coin layer mixes the two-branch secret into four branches
    const SystemShape shape(2, 2);
    const SecretSpec secret(cplx{0.6, 0.0}, cplx{0.0, 0.8});
    const auto start = prepare_shared_secret(secret, shape);
    const auto rules = homogeneous_rules(2, CoinRule::hadamard());
    const auto sparse = stage_one(start, shape, rules);
    REQUIRE(sparse.support_size() == 4);

    const auto dense = oracle::dense_stage_one(shape, oracle::dense_from_sparse(start), rules);
    REQUIRE(max_term_distance(sparse, oracle::sparse_from_dense(shape.full_space(), dense)) < compare_tol);
}

TEST_CASE("stage two reproduces the printed evolved states") {
    const SystemShape shape(2, 2);
    const cplx alpha{0.6, 0.0}, beta{0.8, 0.0};
    const SecretSpec secret(alpha, beta);
    const auto mid = stage_one(prepare_shared_secret(secret, shape), shape, homogeneous_rules(2, CoinRule::identity()));

    SECTION("Hadamard rules give the eight-term homogeneous state") {
        const auto out = stage_two(mid, shape, homogeneous_rules(2, CoinRule::hadamard()));
        REQUIRE(out.support_size() == 8);
        REQUIRE(fidelity(out, oracle::closed_form_h(shape, secret)) > 1.0 - compare_tol);
        // spot-check one branch amplitude: alpha |3>|1>|00>|00> / 2
        BasisState lead{{3, 1}, {0, 0, 0, 0}};
        REQUIRE(std::abs(out.amplitude(shape.digits_of(lead)) - alpha * 0.5) < compare_tol);
    }

    SECTION("position-keyed rules give the two-branch state") {
        const auto out = stage_two(mid, shape, position_dependent_rules(2));
        REQUIRE(out.support_size() == 2);
        BasisState up{{3, 1}, {0, 0, 0, 0}};
        BasisState down{{-3, -1}, {1, 1, 1, 1}};
        REQUIRE(std::abs(out.amplitude(shape.digits_of(up)) - alpha) < norm_tol);
        REQUIRE(std::abs(out.amplitude(shape.digits_of(down)) - beta) < norm_tol);
        REQUIRE(fidelity(out, oracle::closed_form_p(shape, secret)) > 1.0 - compare_tol);
    }

    SECTION("n=1, m=3 Hadamard walk matches the dense reference") {
        const SystemShape wide(1, 3);
        const auto start = prepare_shared_secret(secret, wide);
        const auto rules1 = homogeneous_rules(1, CoinRule::identity());
        const auto rules2 = homogeneous_rules(3, CoinRule::hadamard());
        const auto sparse = stage_two(stage_one(start, wide, rules1), wide, rules2);
        REQUIRE(sparse.support_size() == 16);
        auto dense = oracle::dense_stage_one(wide, oracle::dense_from_sparse(start), rules1);
        dense = oracle::dense_stage_two(wide, dense, rules2);
        REQUIRE(max_term_distance(sparse, oracle::sparse_from_dense(wide.full_space(), dense)) < compare_tol);
    }
}

TEST_CASE("stages preserve the norm of random states") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemShape shape(2, 3);
        // stage one moves every walker once; stage two moves walker 1 m times
        auto psi1 = random_interior_state(shape, rng, 8, 1, true);
        auto psi2 = random_interior_state(shape, rng, 8, shape.receivers(), false);
        auto rules1 = homogeneous_rules(2, trial % 2 ? CoinRule::hadamard() : CoinRule::constant(random_unitary(rng)));
        auto rules2 = homogeneous_rules(3, CoinRule::hadamard());
        REQUIRE(std::abs(stage_one(psi1, shape, rules1).norm() - 1.0) < norm_tol);
        REQUIRE(std::abs(stage_two(psi2, shape, rules2).norm() - 1.0) < norm_tol);
    }
}

TEST_CASE("stage-two factors on distinct coins commute for homogeneous rules") {
    std::mt19937_64 rng(29);
    const SystemShape shape(2, 3);
    for (int trial = 0; trial < 10; ++trial) {
        auto psi = random_interior_state(shape, rng, 6, 2, false);
        const CoinRule rule = trial % 2 ? CoinRule::hadamard() : CoinRule::constant(random_unitary(rng));
        StepSpec f1{shape.receiver_coin(1), 1, rule};
        StepSpec f2{shape.receiver_coin(3), 1, rule};
        auto ab = apply_step(apply_step(psi, f1), f2);
        auto ba = apply_step(apply_step(psi, f2), f1);
        REQUIRE(max_term_distance(ab, ba) < norm_tol);
    }
}

TEST_CASE("sparse stages equal the dense reference on random inputs") {
    std::mt19937_64 rng(31);
    for (int n = 1; n <= 3; ++n) {
        for (int m = 2; m <= 3; ++m) {
            const SystemShape shape(n, m);
            const SecretSpec secret = random_secret(rng);
            const auto start = prepare_shared_secret(secret, shape);
            for (Variant variant : {Variant::homogeneous, Variant::position_dependent}) {
                const auto rules1 = homogeneous_rules(n, CoinRule::identity());
                const auto rules2 = variant == Variant::homogeneous ? homogeneous_rules(m, CoinRule::hadamard())
                                                                    : position_dependent_rules(m);
                const auto sparse = stage_two(stage_one(start, shape, rules1), shape, rules2);
                auto dense = oracle::dense_stage_one(shape, oracle::dense_from_sparse(start), rules1);
                dense = oracle::dense_stage_two(shape, dense, rules2);
                REQUIRE(max_term_distance(sparse, oracle::sparse_from_dense(shape.full_space(), dense)) < compare_tol);
            }
        }
    }
}

TEST_CASE("dense kernels agree with explicitly materialized step matrices") {
    const SystemShape shape(2, 2);
    const SlotSpace space = shape.full_space();
    const SecretSpec secret(cplx{0.6, 0.0}, cplx{0.48, 0.64});
    const auto start = oracle::dense_from_sparse(prepare_shared_secret(secret, shape));

    StepSpec step{shape.receiver_coin(1), 1, CoinRule::hadamard()};
    const auto columns = oracle::dense_step_matrix(space, step, space.find(shape.position(1)));
    const auto via_matrix = oracle::dense_matvec(columns, start);
    const auto via_kernel = oracle::dense_apply_step(space, start, step, space.find(shape.position(1)));
    for (std::size_t i = 0; i < via_matrix.size(); ++i) REQUIRE(std::abs(via_matrix[i] - via_kernel[i]) < norm_tol);
}

TEST_CASE("single-walker Hadamard walk sanity") {
    // two steps of the textbook walk from |0>|0>: P(-2)=1/4, P(0)=1/2, P(2)=1/4
    SlotSpace space({position_slot(1), coin_slot(0)}, {7, 2});
    auto psi = StateVector::basis_state(space, std::vector<int>{3, 0});
    for (int t = 0; t < 2; ++t)
        psi = apply_conditional_shift(apply_coin(psi, coin_slot(0), CoinRule::hadamard()), position_slot(1),
                                      coin_slot(0));
    double p_minus2 = 0.0, p_zero = 0.0, p_plus2 = 0.0;
    psi.for_each_term([&](const std::vector<int>& digits, cplx a) {
        if (digits[0] == 1) p_minus2 += std::norm(a);
        if (digits[0] == 3) p_zero += std::norm(a);
        if (digits[0] == 5) p_plus2 += std::norm(a);
    });
    REQUIRE(std::abs(p_minus2 - 0.25) < norm_tol);
    REQUIRE(std::abs(p_zero - 0.5) < norm_tol);
    REQUIRE(std::abs(p_plus2 - 0.25) < norm_tol);
}
