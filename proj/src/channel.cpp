#include "qkdmem/channel.hpp"

#include <algorithm>
#include <cmath>

namespace qkdmem {

void Channel::check(double tol) const {
    if (kraus.empty()) throw InvalidStateError("channel has no Kraus operators");
    if (!labels_unique(input_labels) || !labels_unique(output_labels))
        throw InvalidStateError("channel register labels must be unique");
    CMat sum(dim_in(), dim_in());
    for (const auto& k : kraus) {
        if (k.rows != dim_out() || k.cols != dim_in())
            throw InvalidStateError("Kraus operator shape does not match channel registers");
        sum = sum + k.adjoint() * k;
    }
    if (sum.max_abs_diff(CMat::identity(dim_in())) > tol)
        throw InvalidStateError("Kraus operators are not complete (sum K†K != I)");
}

CMat Channel::apply_matrix(const CMat& rho_in) const {
    if (rho_in.rows != dim_in() || rho_in.cols != dim_in())
        throw InvalidStateError("matrix shape does not match channel input dimension");
    CMat out(dim_out(), dim_out());
    for (const auto& k : kraus) out = out + k * rho_in * k.adjoint();
    return out;
}

Channel Channel::rebind(std::vector<Label> in, std::vector<Label> out) const {
    if (in.size() != input_labels.size() || out.size() != output_labels.size())
        throw InvalidStateError("rebind register counts do not match channel shape");
    Channel c;
    c.kraus = kraus;
    c.input_labels = std::move(in);
    c.output_labels = std::move(out);
    return c;
}

Channel Channel::identity(Label l) {
    Channel c;
    c.kraus = {CMat::identity(2)};
    c.input_labels = {l};
    c.output_labels = {std::move(l)};
    return c;
}

Channel Channel::depolarizing(Label l, double strength) {
    if (strength < 0.0 || strength > 1.0)
        throw InvalidStateError("depolarizing strength must be in [0,1]");
    // Pauli-twirl form: K_0 = sqrt(1-3p/4) I, K_i = sqrt(p/4) sigma_i.
    CMat sx(2, 2), sy(2, 2), sz(2, 2);
    sx.at(0, 1) = 1.0;
    sx.at(1, 0) = 1.0;
    sy.at(0, 1) = cplx{0.0, -1.0};
    sy.at(1, 0) = cplx{0.0, 1.0};
    sz.at(0, 0) = 1.0;
    sz.at(1, 1) = -1.0;
    Channel c;
    c.kraus.push_back(std::sqrt(1.0 - 0.75 * strength) * CMat::identity(2));
    c.kraus.push_back(std::sqrt(0.25 * strength) * sx);
    c.kraus.push_back(std::sqrt(0.25 * strength) * sy);
    c.kraus.push_back(std::sqrt(0.25 * strength) * sz);
    c.input_labels = {l};
    c.output_labels = {std::move(l)};
    return c;
}

Channel Channel::replace_with_memory(Label mem, Label q_in, Label q_out) {
    Channel c;
    for (int t = 0; t < 2; ++t) {
        CMat k(2, 4);  // |m> <m,q| with q fixed to t
        k.at(0, static_cast<std::size_t>(t)) = 1.0;
        k.at(1, static_cast<std::size_t>(2 + t)) = 1.0;
        c.kraus.push_back(std::move(k));
    }
    c.input_labels = {std::move(mem), std::move(q_in)};
    c.output_labels = {std::move(q_out)};
    return c;
}

std::vector<WeightedState> apply_channel_branches(const Channel& ch, const StateVector& psi) {
    std::vector<WeightedState> out;
    for (const auto& k : ch.kraus) {
        StateVector branch = psi.apply_op(ch.input_labels, ch.output_labels, k);
        double w = branch.norm_squared();
        if (w <= kZeroProbTol) continue;
        double inv = 1.0 / std::sqrt(w);
        for (auto& a : branch.amps) a *= inv;
        out.push_back({w, std::move(branch)});
    }
    return out;
}

MixedState apply_channel(const Channel& ch, const StateVector& psi) {
    MixedState m;
    for (auto& b : apply_channel_branches(ch, psi)) m.components.push_back({b.weight, std::move(b.state)});
    return m;
}

MixedState apply_channel(const Channel& ch, const MixedState& m) {
    MixedState out;
    for (const auto& c : m.components) {
        for (auto& b : apply_channel_branches(ch, c.state))
            out.components.push_back({c.weight * b.weight, std::move(b.state)});
    }
    return out;
}

DensityOperator apply_channel(const Channel& ch, const DensityOperator& rho) {
    // Permute the acted-on registers to the low-order end, apply the embedded
    // Kraus operators, keep the untouched registers in place.
    std::vector<Label> rest;
    for (const auto& l : rho.labels) {
        if (std::find(ch.input_labels.begin(), ch.input_labels.end(), l) ==
            ch.input_labels.end())
            rest.push_back(l);
    }
    if (rest.size() + ch.input_labels.size() != rho.labels.size())
        throw UnknownLabelError("channel input labels are not a subset of the state's registers");
    std::vector<Label> order = rest;
    order.insert(order.end(), ch.input_labels.begin(), ch.input_labels.end());
    DensityOperator perm = rho.permuted(order);

    const std::size_t rest_dim = std::size_t{1} << rest.size();
    CMat out(rest_dim * ch.dim_out(), rest_dim * ch.dim_out());
    for (const auto& k : ch.kraus) {
        CMat k_full = kron(CMat::identity(rest_dim), k);
        out = out + k_full * perm.mat * k_full.adjoint();
    }
    std::vector<Label> out_labels = rest;
    for (const auto& l : ch.output_labels) {
        if (std::find(rest.begin(), rest.end(), l) != rest.end())
            throw InvalidStateError("channel output label collides with an existing register: " +
                                    l);
        out_labels.push_back(l);
    }
    return DensityOperator(std::move(out_labels), std::move(out));
}

}  // namespace qkdmem
