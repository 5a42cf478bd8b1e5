#include "qkdmem/compile.hpp"

#include <cmath>
#include <map>

namespace qkdmem {

namespace {

CMat matrix_unit(std::size_t dim, std::size_t r, std::size_t c) {
    CMat m(dim, dim);
    m.at(r, c) = 1.0;
    return m;
}

// For an arity-2 channel (memory, qubit) -> qubit: checks the memory factor
// is discarded, i.e. C(|i><j| ⊗ E) = δ_ij R(E), and returns R's Kraus set.
std::vector<CMat> extract_residual(const Channel& ch, double tol, const std::string& where) {
    CMat choi(4, 4);  // sum_qq' |q><q'| ⊗ R(|q><q'|)
    for (std::size_t q = 0; q < 2; ++q) {
        for (std::size_t qp = 0; qp < 2; ++qp) {
            CMat e = matrix_unit(2, q, qp);
            CMat r00 = ch.apply_matrix(kron(matrix_unit(2, 0, 0), e));
            CMat r11 = ch.apply_matrix(kron(matrix_unit(2, 1, 1), e));
            CMat off01 = ch.apply_matrix(kron(matrix_unit(2, 0, 1), e));
            CMat off10 = ch.apply_matrix(kron(matrix_unit(2, 1, 0), e));
            if (off01.max_abs_diff(CMat(2, 2)) > tol || off10.max_abs_diff(CMat(2, 2)) > tol ||
                r00.max_abs_diff(r11) > tol)
                throw MemoryNotTrivialError("memory channel at " + where +
                                            " reads its memory register");
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t c = 0; c < 2; ++c)
                    choi.at(2 * q + r, 2 * qp + c) = r00.at(r, c);
        }
    }
    // Kraus operators from the Choi eigendecomposition.
    HermitianEig eig = hermitian_eig(choi);
    std::vector<CMat> kraus;
    for (std::size_t k = 0; k < 4; ++k) {
        double lam = eig.values[k];
        if (lam <= tol) continue;
        CMat op(2, 2);
        for (std::size_t q = 0; q < 2; ++q)
            for (std::size_t r = 0; r < 2; ++r)
                op.at(r, q) = std::sqrt(lam) * eig.vectors.at(2 * q + r, k);
        kraus.push_back(std::move(op));
    }
    return kraus;
}

}  // namespace

Process1Spec compile_trivial_memory(const Process2Behaviour& behaviour, std::size_t n_rounds,
                                    double tol) {
    if (n_rounds == 0) throw QkdError("round count must be positive");
    if (!behaviour.eve_prepare || !behaviour.program)
        throw InvalidStateError("behaviour is missing its preparation or program");

    // Per (party, round): residual channel acting on that round's qubit, or
    // empty when the round measures the delivered qubit directly.
    std::map<std::pair<int, std::size_t>, std::vector<CMat>> residual;
    std::map<std::pair<int, std::size_t>, Instrument> overrides;
    for (std::size_t j = 1; j <= n_rounds; ++j) {
        for (Party p : {Party::A, Party::B}) {
            const std::string where =
                "party " + to_string(p) + ", round " + std::to_string(j);
            PartyRoundProgram prog = behaviour.program(p, j);
            const int pi = p == Party::A ? 0 : 1;
            if (prog.fixed_instrument) overrides.insert({{pi, j}, *prog.fixed_instrument});
            if (!prog.memory_channel) continue;
            const Channel& ch = *prog.memory_channel;
            ch.check(tol);
            if (ch.input_labels.size() == 1) {
                residual[{pi, j}] = ch.kraus;
            } else if (ch.input_labels.size() == 2) {
                if (j == 1)
                    throw InvalidStateError("round 1 program consumes memory, but none exists");
                residual[{pi, j}] = extract_residual(ch, tol, where);
            } else {
                throw InvalidStateError("memory channel must take one or two registers");
            }
        }
    }

    Process1Spec spec;
    spec.n_rounds = n_rounds;
    P1Component comp;
    comp.weight = 1.0;
    EveMemory eve_mem = 0;
    for (std::size_t j = 1; j <= n_rounds; ++j) {
        const Label la = p1_label(Party::A, j);
        const Label lb = p1_label(Party::B, j);
        StateVector prep = behaviour.eve_prepare(j, eve_mem, la, lb);
        if (prep.labels != std::vector<Label>{la, lb})
            throw InvalidStateError("preparation must emit the two requested registers");

        std::vector<WeightedState> ensemble{{1.0, std::move(prep)}};
        for (Party p : {Party::A, Party::B}) {
            auto it = residual.find({p == Party::A ? 0 : 1, j});
            if (it == residual.end()) continue;
            Channel bound;
            bound.kraus = it->second;
            bound.input_labels = {p == Party::A ? la : lb};
            bound.output_labels = {p == Party::A ? la : lb};
            std::vector<WeightedState> next;
            for (const auto& member : ensemble) {
                for (auto& br : apply_channel_branches(bound, member.state))
                    next.push_back({member.weight * br.weight, std::move(br.state)});
            }
            ensemble = std::move(next);
        }
        P1Block block;
        block.ensemble = std::move(ensemble);
        comp.blocks.push_back(std::move(block));
    }
    spec.components.push_back(std::move(comp));

    if (!overrides.empty()) {
        spec.instrument_map = [overrides](Party p, std::size_t j, Basis b) {
            auto it = overrides.find({p == Party::A ? 0 : 1, j});
            if (it != overrides.end()) return it->second;
            return Instrument::standard(b);
        };
    }
    spec.ebits = behaviour.ebit_budget ? behaviour.ebit_budget(n_rounds) : 0;
    return spec;
}

}  // namespace qkdmem
