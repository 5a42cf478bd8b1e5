#include "qkdmem/instrument.hpp"

#include <cmath>

namespace qkdmem {

Basis other(Basis b) { return b == Basis::X ? Basis::Z : Basis::X; }

std::string to_string(Basis b) { return b == Basis::X ? "X" : "Z"; }

Basis parse_basis(const std::string& s) {
    if (s == "X" || s == "x") return Basis::X;
    if (s == "Z" || s == "z") return Basis::Z;
    throw QkdError("unknown basis: " + s);
}

Instrument Instrument::standard(Basis b) {
    Instrument ins;
    ins.basis = b;
    if (b == Basis::Z) {
        ins.eigvec = {{{cplx{1.0}, cplx{0.0}}, {cplx{0.0}, cplx{1.0}}}};
    } else {
        const double r = 1.0 / std::sqrt(2.0);
        ins.eigvec = {{{cplx{r}, cplx{r}}, {cplx{r}, cplx{-r}}}};
    }
    return ins;
}

CMat Instrument::projector(int outcome) const {
    const auto& e = eigvec[static_cast<std::size_t>(outcome)];
    CMat p(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) p.at(r, c) = e[r] * std::conj(e[c]);
    return p;
}

void Instrument::check(double tol) const {
    for (int o = 0; o < 2; ++o) {
        const auto& e = eigvec[static_cast<std::size_t>(o)];
        double n = std::norm(e[0]) + std::norm(e[1]);
        if (std::abs(n - 1.0) > tol) throw InvalidStateError("instrument eigenvector not unit");
        CMat p = projector(o);
        if ((p * p).max_abs_diff(p) > tol)
            throw InvalidStateError("instrument projector not idempotent");
    }
    CMat sum = projector(0) + projector(1);
    if (sum.max_abs_diff(CMat::identity(2)) > tol)
        throw InvalidStateError("instrument projectors do not sum to identity");
}

namespace {

// Projects `psi` onto outcome `o` of `ins` at label `l` without renormalizing;
// returns the branch probability.
double project_branch(StateVector& psi, const Label& l, const Instrument& ins, int o) {
    psi = psi.apply_1q(l, ins.projector(o));
    return psi.norm_squared();
}

}  // namespace

std::array<MeasureBranch, 2> measure_all_branches(const StateVector& psi, const Label& l,
                                                  const Instrument& ins) {
    std::array<MeasureBranch, 2> out;
    for (int o = 0; o < 2; ++o) {
        StateVector branch = psi;
        double p = project_branch(branch, l, ins, o);
        out[static_cast<std::size_t>(o)].outcome = o;
        out[static_cast<std::size_t>(o)].probability = p;
        if (p > kZeroProbTol) {
            branch.normalize();
            out[static_cast<std::size_t>(o)].post = std::move(branch);
        }
    }
    return out;
}

std::array<MeasureBranch, 2> measure_all_branches(const StateVector& psi, const Label& l,
                                                  Basis b) {
    return measure_all_branches(psi, l, Instrument::standard(b));
}

MeasureResult measure(const StateVector& psi, const Label& l, const Instrument& ins, double u) {
    StateVector branch0 = psi;
    double p0 = project_branch(branch0, l, ins, 0);
    MeasureResult r;
    if (u < p0) {
        r.outcome = 0;
        r.probability = p0;
        branch0.normalize();
        r.post = std::move(branch0);
    } else {
        StateVector branch1 = psi;
        double p1 = project_branch(branch1, l, ins, 1);
        if (p1 <= kZeroProbTol)
            throw ZeroProbabilityError("sampled a zero-probability measurement branch");
        r.outcome = 1;
        r.probability = p1;
        branch1.normalize();
        r.post = std::move(branch1);
    }
    return r;
}

MeasureResult measure(const StateVector& psi, const Label& l, Basis b, double u) {
    return measure(psi, l, Instrument::standard(b), u);
}

MeasureResult measure_branch(const StateVector& psi, const Label& l, const Instrument& ins,
                             int outcome) {
    StateVector branch = psi;
    double p = project_branch(branch, l, ins, outcome);
    if (p <= kZeroProbTol)
        throw ZeroProbabilityError("requested branch has zero probability");
    branch.normalize();
    return MeasureResult{outcome, std::move(branch), p};
}

CMat embed_1q(const CMat& op, std::size_t n, std::size_t pos) {
    CMat out = CMat::identity(1);
    for (std::size_t k = 0; k < n; ++k) out = kron(out, k == pos ? op : CMat::identity(2));
    return out;
}

std::array<MeasureBranchD, 2> measure_all_branches(const DensityOperator& rho, const Label& l,
                                                   const Instrument& ins) {
    const std::size_t pos = rho.label_index(l);
    std::array<MeasureBranchD, 2> out;
    for (int o = 0; o < 2; ++o) {
        CMat p_full = embed_1q(ins.projector(o), rho.labels.size(), pos);
        CMat m = p_full * rho.mat * p_full;  // projectors are Hermitian
        double p = m.trace().real();
        out[static_cast<std::size_t>(o)].outcome = o;
        out[static_cast<std::size_t>(o)].probability = p;
        if (p > kZeroProbTol) {
            out[static_cast<std::size_t>(o)].post =
                DensityOperator(rho.labels, (1.0 / p) * m);
        }
    }
    return out;
}

MeasureResultD measure(const DensityOperator& rho, const Label& l, const Instrument& ins,
                       double u) {
    auto branches = measure_all_branches(rho, l, ins);
    int o = (u < branches[0].probability) ? 0 : 1;
    auto& br = branches[static_cast<std::size_t>(o)];
    if (!br.post) throw ZeroProbabilityError("sampled a zero-probability measurement branch");
    return MeasureResultD{o, std::move(*br.post), br.probability};
}

MeasureResultD measure(const DensityOperator& rho, const Label& l, Basis b, double u) {
    return measure(rho, l, Instrument::standard(b), u);
}

}  // namespace qkdmem
