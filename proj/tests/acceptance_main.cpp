// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion carries its own runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qkdmem/analysis.hpp"
#include "qkdmem/compile.hpp"
#include "qkdmem/experiment.hpp"
#include "qkdmem/random_states.hpp"

using namespace qkdmem;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int idx, const std::string& name, bool ok, double secs, double budget,
            const std::string& detail) {
    const bool pass = ok && secs < budget;
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %d: %s (%.2fs / %.0fs budget)%s%s\n", pass ? "PASS" : "FAIL",
                idx, name.c_str(), secs, budget, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// --- 1: retained-qubit device emits one identical string per trial --------

void criterion1() {
    Timer timer;
    const Device dev = make_device("retain_remeasure", 10);
    const InputSeq inputs(10, InputPair{Basis::X, Basis::X});
    const std::size_t trials = 10000;
    std::size_t identical = 0, all_zero = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        Rng rng = trial_rng(1, i);
        const DeviceTrace tr = run_device(dev, inputs, rng);
        bool same = true;
        for (const auto& r : tr.rounds)
            same = same && r.output_a == tr.rounds[0].output_a &&
                   r.output_b == tr.rounds[0].output_a;
        if (same) ++identical;
        if (same && tr.rounds[0].output_a == 0) ++all_zero;
    }
    const double frac = static_cast<double>(all_zero) / static_cast<double>(trials);
    const bool ok = identical == trials && frac >= 0.485 && frac <= 0.515;
    report(1, "all-round output identity (retain_remeasure, n=10, 1e4 trials)", ok,
           timer.seconds(), 10.0,
           "identical " + std::to_string(identical) + "/" + std::to_string(trials) +
               ", all-zero fraction " + num(frac) + " in [0.485, 0.515]");
}

// --- 2: naive claim vs actual entropy on the retained qubit ---------------

void criterion2() {
    Timer timer;
    const ContradictionReport rep = contradiction_report(make_device("retain_remeasure", 8), 8);
    const bool ok = rep.naive_claim.delta_ph == 0.0 &&
                    std::abs(rep.naive_claim.claimed_length - 8.0) <= 1e-9 &&
                    std::abs(rep.actual_shannon - 1.0) <= 1e-9 &&
                    std::abs(rep.actual_minentropy - 1.0) <= 1e-9 && rep.ebit_budget == 1;
    report(2, "key-claim contradiction (retain_remeasure, n=8)", ok, timer.seconds(), 5.0,
           "delta_ph " + num(rep.naive_claim.delta_ph) + ", claim " +
               num(rep.naive_claim.claimed_length) + ", shannon " + num(rep.actual_shannon) +
               ", min " + num(rep.actual_minentropy) + ", ebits " +
               std::to_string(rep.ebit_budget));
}

// --- 3: signalling separates the two process models ------------------------

void criterion3() {
    Timer timer;
    const double echo_tv = signalling_measure(make_device("echo", 3), 3).at_round(2).max_tv;
    bool ok = std::abs(echo_tv - 1.0) <= 1e-12;

    double worst_p1 = 0.0;
    worst_p1 = std::max(worst_p1, signalling_measure(Device(iid_bell_spec(3)), 3).max_tv());
    worst_p1 = std::max(worst_p1, signalling_measure(make_device("classical_copy", 3), 3).max_tv());
    Rng rng(333);
    for (int k = 0; k < 20; ++k)
        worst_p1 =
            std::max(worst_p1, signalling_measure(Device(random_process1_spec(3, rng)), 3).max_tv());
    ok = ok && worst_p1 <= 1e-12;
    report(3, "cross-round signalling (echo vs 22 fixed-state specs)", ok, timer.seconds(),
           30.0, "echo round-2 tv " + num(echo_tv) + ", worst fixed-state tv " + num(worst_p1));
}

// --- 4: transcript attacks --------------------------------------------------

void criterion4() {
    Timer timer;
    // Copier: Eve reproduces both the sifted and the hashed key every time.
    const Device copier = make_device("even_copier", 100);
    std::vector<Transcript> batch;
    batch.reserve(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        Rng rng = trial_rng(4, i);
        batch.push_back(run_example_protocol(50, copier, rng));
    }
    const GuessingResult guess = eve_guessing(batch, "copy_decoder");
    bool ok = guess.success_rate == 1.0 && guess.matches == 1000 && guess.pa_trials == 1000 &&
              guess.pa_matches == 1000;

    // Honest fixed-state device: the best decoder's conditional success is
    // exactly 2^-k for every sifted key length k.
    const MapDecoderExact exact = map_decoder_exact(Device(iid_bell_spec(6)), 3, 0.25);
    double worst = 0.0;
    for (const auto& [len, succ] : exact.success_by_length)
        worst = std::max(worst,
                         std::abs(succ - std::pow(2.0, -static_cast<double>(len))));
    ok = ok && !exact.success_by_length.empty() && worst <= 1e-12;
    report(4, "announcement attack and honest-device guessing cap", ok, timer.seconds(), 60.0,
           "copy rate " + num(guess.success_rate) + ", PA matches " +
               std::to_string(guess.pa_matches) + "/" + std::to_string(guess.pa_trials) +
               ", max |succ(k) - 2^-k| " + num(worst));
}

// --- 5: trivial-memory compilation equivalence ------------------------------

double worst_tv_all_inputs(const Device& direct, const Device& compiled, std::size_t n) {
    double worst = 0.0;
    for (std::uint64_t key = 0; key < (std::uint64_t{1} << (2 * n)); ++key) {
        const InputSeq in = unpack_inputs(key, n);
        worst = std::max(
            worst, total_variation(enumerate_outputs(direct, in), enumerate_outputs(compiled, in)));
    }
    return worst;
}

double sampled_homogeneity_p(const Device& direct, const Device& compiled, std::size_t n,
                             std::size_t trials) {
    InputSeq inputs;
    for (std::size_t j = 0; j < n; ++j)
        inputs.push_back({j % 2 ? Basis::Z : Basis::X, j % 3 ? Basis::Z : Basis::X});
    const std::size_t bins = 64;
    std::vector<std::uint64_t> ca(bins, 0), cb(bins, 0);
    Rng ra(5001), rb(5002);
    for (std::size_t i = 0; i < trials; ++i) {
        ++ca[splitmix64(run_device(direct, inputs, ra).packed_outputs()) % bins];
        ++cb[splitmix64(run_device(compiled, inputs, rb).packed_outputs()) % bins];
    }
    return stats::chi2_two_sample(ca, cb).p_value;
}

void criterion5() {
    Timer timer;
    const Process2Behaviour bell = iid_bell();
    Rng rng(55);
    const Process2Behaviour rnd = random_trivial_behaviour(rng);

    const double tv_bell = worst_tv_all_inputs(Device(bell), Device(compile_trivial_memory(bell, 3)), 3);
    const double tv_rnd = worst_tv_all_inputs(Device(rnd), Device(compile_trivial_memory(rnd, 3)), 3);

    const double p_bell =
        sampled_homogeneity_p(Device(bell), Device(compile_trivial_memory(bell, 20)), 20, 100000);
    const double p_rnd =
        sampled_homogeneity_p(Device(rnd), Device(compile_trivial_memory(rnd, 20)), 20, 100000);

    bool rejected = false;
    try {
        compile_trivial_memory(retain_remeasure(), 3);
    } catch (const MemoryNotTrivialError&) {
        rejected = true;
    }

    const bool ok =
        tv_bell < 1e-9 && tv_rnd < 1e-9 && p_bell > 0.001 && p_rnd > 0.001 && rejected;
    report(5, "measurement-deferral compilation equivalence", ok, timer.seconds(), 60.0,
           "tv(bell) " + num(tv_bell) + ", tv(random) " + num(tv_rnd) + ", chi2 p " +
               num(p_bell) + " / " + num(p_rnd) +
               (rejected ? ", nontrivial memory rejected" : ", REJECTION MISSING"));
}

// --- 6: test-subset invariance ----------------------------------------------

void criterion6() {
    Timer timer;
    double worst = 0.0;
    for (std::size_t n = 2; n <= 4; ++n) {
        worst = std::max(worst, test_subset_invariance(Device(iid_bell_spec(n)), n).max_tv);
        worst = std::max(worst, test_subset_invariance(make_device("classical_copy", n), n).max_tv);
    }
    Rng rng(66);
    worst = std::max(worst, test_subset_invariance(Device(random_process1_spec(3, rng)), 3).max_tv);
    worst = std::max(worst, test_subset_invariance(Device(random_process1_spec(3, rng)), 3).max_tv);
    worst = std::max(worst, test_subset_invariance(Device(random_process1_spec(4, rng)), 4).max_tv);

    const SubsetInvarianceResult wit = test_subset_invariance(make_device("retain_remeasure", 3), 3);
    const bool ok = worst < 1e-9 && wit.max_tv >= 0.25 && !wit.test_rounds.empty();
    report(6, "test-subset invariance (fixed-state) and memory witness", ok, timer.seconds(),
           30.0,
           "worst fixed-state tv " + num(worst) + ", retain witness tv " + num(wit.max_tv));
}

// --- 7: quantum-core property suite ------------------------------------------

void criterion7() {
    Timer timer;
    Rng rng(77);
    std::size_t cases = 0, bad = 0;
    const Instrument ix = Instrument::standard(Basis::X);
    const Instrument iz = Instrument::standard(Basis::Z);
    for (; cases < 1000; ++cases) {
        bool good = true;

        // Normalization.
        const std::size_t nq = 1 + rng.next_index(3);
        std::vector<Label> labels;
        for (std::size_t q = 0; q < nq; ++q) labels.push_back("q" + std::to_string(q));
        StateVector psi = random_pure_state(labels, rng);
        good = good && std::abs(psi.norm_squared() - 1.0) <= 1e-9;

        // Instrument completeness and mutual unbiasedness.
        good = good &&
               (ix.projector(0) + ix.projector(1)).max_abs_diff(CMat::identity(2)) <= 1e-12 &&
               (iz.projector(0) + iz.projector(1)).max_abs_diff(CMat::identity(2)) <= 1e-12;
        for (int a = 0; a < 2 && good; ++a)
            for (int b = 0; b < 2 && good; ++b) {
                cplx ov = 0.0;
                for (int k = 0; k < 2; ++k) ov += std::conj(ix.eigvec[a][k]) * iz.eigvec[b][k];
                good = std::abs(std::norm(ov) - 0.5) <= 1e-12;
            }

        // Repeatability.
        const Label l = labels[rng.next_index(nq)];
        const Basis basis = rng.next_bit() ? Basis::X : Basis::Z;
        const MeasureResult first = measure(psi, l, basis, rng.next_double());
        const MeasureResult again = measure(first.post, l, basis, rng.next_double());
        good = good && again.outcome == first.outcome &&
               std::abs(again.probability - 1.0) <= 1e-12;

        // Tensor then partial trace returns both factors.
        const DensityOperator ra =
            partial_trace(DensityOperator::from_pure(random_pure_state({"a", "x"}, rng)), {"a"});
        const DensityOperator rb =
            partial_trace(DensityOperator::from_pure(random_pure_state({"b", "y"}, rng)), {"b"});
        const DensityOperator joint = tensor(ra, rb);
        good = good && partial_trace(joint, {"a"}).mat.max_abs_diff(ra.mat) <= 1e-9 &&
               partial_trace(joint, {"b"}).mat.max_abs_diff(rb.mat) <= 1e-9;

        if (!good) ++bad;
    }
    report(7, "quantum-core randomized property suite", bad == 0, timer.seconds(), 10.0,
           std::to_string(cases - bad) + "/" + std::to_string(cases) + " cases clean");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    if (g_failures == 0)
        std::printf("acceptance: all 7 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
