#include <doctest.h>

#include <cmath>
#include <vector>

#include "qkdmem/channel.hpp"
#include "qkdmem/instrument.hpp"
#include "qkdmem/random_states.hpp"
#include "qkdmem/rng.hpp"
#include "qkdmem/state.hpp"

using namespace qkdmem;

TEST_CASE("basis helpers") {
    CHECK(other(Basis::X) == Basis::Z);
    CHECK(other(Basis::Z) == Basis::X);
    CHECK(to_string(Basis::X) == "X");
    CHECK(parse_basis("Z") == Basis::Z);
    CHECK_THROWS_AS(parse_basis("Y"), QkdError);
}

TEST_CASE("standard instruments are valid and mutually unbiased") {
    const Instrument ix = Instrument::standard(Basis::X);
    const Instrument iz = Instrument::standard(Basis::Z);
    ix.check();
    iz.check();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cplx ov = 0.0;
            for (int k = 0; k < 2; ++k) ov += std::conj(ix.eigvec[a][k]) * iz.eigvec[b][k];
            CHECK(std::abs(std::norm(ov) - 0.5) < 1e-12);
        }
    // Projectors sum to identity.
    CHECK((ix.projector(0) + ix.projector(1)).max_abs_diff(CMat::identity(2)) < 1e-12);
}

TEST_CASE("measurement follows the Born rule on known states") {
    const StateVector zero = StateVector::computational({"q"}, 0);
    const MeasureResult mz = measure(zero, "q", Basis::Z, 0.99);
    CHECK(mz.outcome == 0);
    CHECK(mz.probability == doctest::Approx(1.0));

    // |0> in X: both outcomes at 1/2; u selects the branch (outcome 0 first).
    const MeasureResult lo = measure(zero, "q", Basis::X, 0.3);
    const MeasureResult hi = measure(zero, "q", Basis::X, 0.7);
    CHECK(lo.outcome == 0);
    CHECK(hi.outcome == 1);
    CHECK(lo.probability == doctest::Approx(0.5));
    CHECK(hi.probability == doctest::Approx(0.5));

    // The measured label survives, collapsed onto the eigenstate.
    CHECK(lo.post.num_qubits() == 1);
    CHECK(lo.post.labels[0] == "q");
    const Instrument ix = Instrument::standard(Basis::X);
    for (int k = 0; k < 2; ++k)
        CHECK(std::abs(lo.post.amps[k] - ix.eigvec[0][k]) < 1e-12);
}

TEST_CASE("measurement is repeatable") {
    Rng rng(21);
    for (int rep = 0; rep < 50; ++rep) {
        const StateVector psi = random_pure_state({"a", "b"}, rng);
        const Basis b = rng.next_bit() ? Basis::X : Basis::Z;
        const Label l = rng.next_bit() ? "a" : "b";
        const MeasureResult first = measure(psi, l, b, rng.next_double());
        const MeasureResult again = measure(first.post, l, b, rng.next_double());
        CHECK(again.outcome == first.outcome);
        CHECK(again.probability == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("zero-probability branches") {
    const StateVector zero = StateVector::computational({"q"}, 0);
    const Instrument iz = Instrument::standard(Basis::Z);
    CHECK_THROWS_AS(measure_branch(zero, "q", iz, 1), ZeroProbabilityError);
    const MeasureResult forced = measure_branch(zero, "q", iz, 0);
    CHECK(forced.outcome == 0);

    const auto branches = measure_all_branches(zero, "q", iz);
    CHECK(branches[0].probability == doctest::Approx(1.0));
    CHECK(branches[0].post.has_value());
    CHECK(branches[1].probability == doctest::Approx(0.0));
    CHECK_FALSE(branches[1].post.has_value());
}

TEST_CASE("joint statistics on a Bell pair") {
    const StateVector bell = bell_state("a", "b");
    // Same-basis measurements agree with probability 1 (X and Z alike).
    for (Basis b : {Basis::X, Basis::Z}) {
        for (const auto& first : measure_all_branches(bell, "a", b)) {
            REQUIRE(first.probability == doctest::Approx(0.5));
            const auto second = measure_all_branches(*first.post, "b", b);
            CHECK(second[static_cast<std::size_t>(first.outcome)].probability ==
                  doctest::Approx(1.0));
        }
    }
    // X on one half leaves the other half in the same X eigenstate: post
    // state after outcome 0 contracts to |+> on b.
    const auto xb = measure_all_branches(bell, "a", Basis::X);
    const Instrument ix = Instrument::standard(Basis::X);
    const cplx e0[2] = {ix.eigvec[0][0], ix.eigvec[0][1]};
    StateVector rest = xb[0].post->contract_qubit("a", e0);
    rest.normalize();
    for (int k = 0; k < 2; ++k) CHECK(std::abs(rest.amps[k] - ix.eigvec[0][k]) < 1e-12);
}

TEST_CASE("density-operator measurement matches the pure-state path") {
    Rng rng(22);
    const StateVector psi = random_pure_state({"a", "b"}, rng);
    const DensityOperator rho = DensityOperator::from_pure(psi);
    const Instrument iz = Instrument::standard(Basis::Z);
    const auto pure = measure_all_branches(psi, "a", iz);
    const auto dens = measure_all_branches(rho, "a", iz);
    for (int k = 0; k < 2; ++k) {
        CHECK(dens[k].probability == doctest::Approx(pure[k].probability).epsilon(1e-12));
        if (pure[k].post)
            CHECK(dens[k].post->mat.max_abs_diff(DensityOperator::from_pure(*pure[k].post).mat) <
                  1e-10);
    }
}

TEST_CASE("identity and depolarizing channels") {
    Channel id = Channel::identity("q");
    id.check();
    Rng rng(23);
    const StateVector psi = random_pure_state({"q"}, rng);
    const MixedState out = apply_channel(id, psi);
    REQUIRE(out.components.size() == 1);
    CHECK(out.components[0].state.max_abs_diff(psi) < 1e-12);

    // Full depolarizing sends every state to I/2.
    Channel dep = Channel::depolarizing("q", 1.0);
    dep.check();
    const DensityOperator rho = apply_channel(dep, DensityOperator::from_pure(psi));
    CHECK(rho.mat.max_abs_diff(cplx(0.5) * CMat::identity(2)) < 1e-12);

    // Partial depolarizing keeps the convex combination.
    Channel half = Channel::depolarizing("q", 0.5);
    half.check();
    const DensityOperator mixed = apply_channel(half, DensityOperator::from_pure(psi));
    const CMat expect = cplx(0.5) * DensityOperator::from_pure(psi).mat +
                        cplx(0.25) * CMat::identity(2);
    CHECK(mixed.mat.max_abs_diff(expect) < 1e-12);
}

TEST_CASE("random channels are trace preserving") {
    Rng rng(24);
    for (int rep = 0; rep < 20; ++rep) {
        const Channel ch = random_channel("q", 1 + rng.next_index(3), rng);
        ch.check();
        const StateVector psi = random_pure_state({"q"}, rng);
        const DensityOperator out = apply_channel(ch, DensityOperator::from_pure(psi));
        CHECK(std::abs(out.mat.trace() - cplx(1.0)) < 1e-10);
        // Branch weights sum to 1 and branches are normalized.
        double total = 0.0;
        for (const auto& w : apply_channel_branches(ch, psi)) {
            total += w.weight;
            CHECK(w.state.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("replace_with_memory swaps the delivered qubit for the stored one") {
    const Channel swap = Channel::replace_with_memory("m", "q", "out");
    swap.check();
    Rng rng(25);
    const StateVector mem = random_pure_state({"m"}, rng);
    const StateVector q = random_pure_state({"q"}, rng);
    const MixedState out = apply_channel(swap, tensor(mem, q));
    const DensityOperator rho = out.to_density();
    // The output register carries the memory content, whatever q was.
    const DensityOperator marginal = partial_trace(rho, {"out"});
    CMat expect(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) expect.at(r, c) = mem.amps[r] * std::conj(mem.amps[c]);
    CHECK(marginal.mat.max_abs_diff(expect) < 1e-10);
}

TEST_CASE("rebind renames channel registers") {
    const Channel ch = Channel::identity("q").rebind({"u"}, {"u"});
    CHECK(ch.input_labels == std::vector<Label>({"u"}));
    const StateVector psi = StateVector::computational({"u"}, 1);
    const MixedState out = apply_channel(ch, psi);
    CHECK(out.components[0].state.max_abs_diff(psi) < 1e-12);
}

TEST_CASE("apply_channel on mixed states keeps total weight") {
    Rng rng(26);
    MixedState m;
    m.components.push_back({0.25, random_pure_state({"q"}, rng)});
    m.components.push_back({0.75, random_pure_state({"q"}, rng)});
    const MixedState out = apply_channel(Channel::depolarizing("q", 0.3), m);
    CHECK(out.total_weight() == doctest::Approx(1.0).epsilon(1e-10));
}
