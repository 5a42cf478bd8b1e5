#include "qkdmem/state.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qkdmem {

std::size_t find_label(const std::vector<Label>& labels, const Label& l) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == l) return i;
    throw UnknownLabelError("unknown register label: " + l);
}

bool labels_unique(const std::vector<Label>& labels) {
    std::set<Label> seen(labels.begin(), labels.end());
    return seen.size() == labels.size();
}

StateVector::StateVector(std::vector<Label> ls, std::vector<cplx> as)
    : labels(std::move(ls)), amps(std::move(as)) {
    if (amps.size() != (std::size_t{1} << labels.size()))
        throw InvalidStateError("amplitude count does not match register count");
}

StateVector StateVector::computational(std::vector<Label> ls, std::uint64_t bits) {
    std::vector<cplx> a(std::size_t{1} << ls.size());
    a[bits] = 1.0;
    return StateVector(std::move(ls), std::move(a));
}

StateVector StateVector::single(Label l, cplx a0, cplx a1) {
    return StateVector({std::move(l)}, {a0, a1});
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
}

void StateVector::normalize() {
    double n = std::sqrt(norm_squared());
    if (n == 0.0) throw InvalidStateError("cannot normalize a zero vector");
    for (auto& a : amps) a /= n;
}

void StateVector::check(double tol) const {
    if (!labels_unique(labels)) throw InvalidStateError("duplicate register labels");
    if (amps.size() != (std::size_t{1} << labels.size()))
        throw InvalidStateError("amplitude count does not match register count");
    if (std::abs(norm_squared() - 1.0) > tol)
        throw InvalidStateError("state vector is not normalized");
}

StateVector StateVector::permuted(const std::vector<Label>& new_order) const {
    if (new_order.size() != labels.size())
        throw UnknownLabelError("permutation must list every register exactly once");
    std::vector<std::size_t> src_shift(new_order.size());
    for (std::size_t k = 0; k < new_order.size(); ++k)
        src_shift[k] = shift_of(label_index(new_order[k]));
    StateVector out;
    out.labels = new_order;
    out.amps.assign(amps.size(), cplx{});
    const std::size_t n = labels.size();
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        std::size_t dst = 0;
        for (std::size_t k = 0; k < n; ++k)
            dst |= ((idx >> src_shift[k]) & 1u) << (n - 1 - k);
        out.amps[dst] = amps[idx];
    }
    return out;
}

StateVector StateVector::contract_qubit(const Label& l, const cplx (&e)[2]) const {
    const std::size_t pos = label_index(l);
    const std::size_t s = shift_of(pos);
    const std::size_t bit = std::size_t{1} << s;
    StateVector out;
    out.labels = labels;
    out.labels.erase(out.labels.begin() + static_cast<std::ptrdiff_t>(pos));
    out.amps.resize(amps.size() / 2);
    std::size_t w = 0;
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        if (idx & bit) continue;
        out.amps[w++] = std::conj(e[0]) * amps[idx] + std::conj(e[1]) * amps[idx | bit];
    }
    return out;
}

StateVector StateVector::apply_1q(const Label& l, const CMat& op) const {
    if (op.rows != 2 || op.cols != 2) throw InvalidStateError("apply_1q needs a 2x2 operator");
    const std::size_t bit = std::size_t{1} << shift_of(label_index(l));
    StateVector out = *this;
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        if (idx & bit) continue;
        cplx a0 = amps[idx], a1 = amps[idx | bit];
        out.amps[idx] = op.at(0, 0) * a0 + op.at(0, 1) * a1;
        out.amps[idx | bit] = op.at(1, 0) * a0 + op.at(1, 1) * a1;
    }
    return out;
}

StateVector StateVector::apply_op(const std::vector<Label>& in_labels,
                                  const std::vector<Label>& out_labels, const CMat& op) const {
    const std::size_t k = in_labels.size();
    const std::size_t j = out_labels.size();
    if (op.cols != (std::size_t{1} << k) || op.rows != (std::size_t{1} << j))
        throw InvalidStateError("operator shape does not match register lists");

    std::vector<std::size_t> in_shift(k);
    for (std::size_t i = 0; i < k; ++i) in_shift[i] = shift_of(label_index(in_labels[i]));

    std::vector<Label> rest;
    std::vector<std::size_t> rest_shift;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        if (std::find(in_labels.begin(), in_labels.end(), labels[p]) != in_labels.end()) continue;
        rest.push_back(labels[p]);
        rest_shift.push_back(shift_of(p));
    }

    StateVector out;
    out.labels = rest;
    for (const auto& l : out_labels) {
        if (std::find(rest.begin(), rest.end(), l) != rest.end())
            throw InvalidStateError("output label collides with an existing register: " + l);
        out.labels.push_back(l);
    }
    out.amps.assign(std::size_t{1} << out.labels.size(), cplx{});

    const std::size_t rest_n = rest.size();
    const std::size_t rest_dim = std::size_t{1} << rest_n;
    std::vector<cplx> in_block(op.cols), out_block(op.rows);
    for (std::size_t r = 0; r < rest_dim; ++r) {
        std::size_t base = 0;
        for (std::size_t p = 0; p < rest_n; ++p)
            base |= ((r >> (rest_n - 1 - p)) & 1u) << rest_shift[p];
        for (std::size_t i = 0; i < op.cols; ++i) {
            std::size_t src = base;
            for (std::size_t p = 0; p < k; ++p) src |= ((i >> (k - 1 - p)) & 1u) << in_shift[p];
            in_block[i] = amps[src];
        }
        for (std::size_t o = 0; o < op.rows; ++o) {
            cplx v = 0.0;
            for (std::size_t i = 0; i < op.cols; ++i) v += op.at(o, i) * in_block[i];
            out_block[o] = v;
        }
        for (std::size_t o = 0; o < op.rows; ++o) out.amps[(r << j) | o] = out_block[o];
    }
    return out;
}

double StateVector::max_abs_diff(const StateVector& other) const {
    if (labels != other.labels) throw UnknownLabelError("register lists differ");
    double d = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        d = std::max(d, std::abs(amps[i] - other.amps[i]));
    return d;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    StateVector out;
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    if (!labels_unique(out.labels)) throw InvalidStateError("tensor factors share a label");
    out.amps.resize(a.amps.size() * b.amps.size());
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        for (std::size_t k = 0; k < b.amps.size(); ++k)
            out.amps[i * b.amps.size() + k] = a.amps[i] * b.amps[k];
    return out;
}

StateVector bell_state(const Label& a, const Label& b) {
    const double r = 1.0 / std::sqrt(2.0);
    return StateVector({a, b}, {r, 0.0, 0.0, r});
}

DensityOperator::DensityOperator(std::vector<Label> ls, CMat m)
    : labels(std::move(ls)), mat(std::move(m)) {
    if (mat.rows != mat.cols || mat.rows != (std::size_t{1} << labels.size()))
        throw InvalidStateError("density matrix shape does not match register count");
}

DensityOperator DensityOperator::from_pure(const StateVector& psi) {
    return DensityOperator(psi.labels, outer(psi.amps, psi.amps));
}

void DensityOperator::check(double tol) const {
    if (!labels_unique(labels)) throw InvalidStateError("duplicate register labels");
    if (!mat.is_hermitian(tol)) throw InvalidStateError("density matrix is not Hermitian");
    if (std::abs(mat.trace() - cplx{1.0}) > tol)
        throw InvalidStateError("density matrix trace is not 1");
    auto eig = hermitian_eigenvalues(mat);
    if (!eig.empty() && eig.front() < -tol)
        throw InvalidStateError("density matrix has a negative eigenvalue");
}

DensityOperator DensityOperator::permuted(const std::vector<Label>& new_order) const {
    if (new_order.size() != labels.size())
        throw UnknownLabelError("permutation must list every register exactly once");
    const std::size_t n = labels.size();
    std::vector<std::size_t> src_shift(n);
    for (std::size_t k = 0; k < n; ++k)
        src_shift[k] = n - 1 - label_index(new_order[k]);
    std::vector<std::size_t> map(mat.rows);
    for (std::size_t idx = 0; idx < mat.rows; ++idx) {
        std::size_t dst = 0;
        for (std::size_t k = 0; k < n; ++k)
            dst |= ((idx >> src_shift[k]) & 1u) << (n - 1 - k);
        map[idx] = dst;
    }
    CMat m(mat.rows, mat.cols);
    for (std::size_t r = 0; r < mat.rows; ++r)
        for (std::size_t c = 0; c < mat.cols; ++c) m.at(map[r], map[c]) = mat.at(r, c);
    return DensityOperator(new_order, std::move(m));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    std::vector<Label> ls = a.labels;
    ls.insert(ls.end(), b.labels.begin(), b.labels.end());
    if (!labels_unique(ls)) throw InvalidStateError("tensor factors share a label");
    return DensityOperator(std::move(ls), kron(a.mat, b.mat));
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<Label>& keep) {
    std::vector<std::size_t> keep_shift;
    for (const auto& l : keep) keep_shift.push_back(rho.labels.size() - 1 - rho.label_index(l));
    std::vector<std::size_t> drop_shift;
    for (std::size_t p = 0; p < rho.labels.size(); ++p) {
        if (std::find(keep.begin(), keep.end(), rho.labels[p]) == keep.end())
            drop_shift.push_back(rho.labels.size() - 1 - p);
    }
    const std::size_t nk = keep.size();
    const std::size_t keep_dim = std::size_t{1} << nk;
    const std::size_t drop_dim = std::size_t{1} << drop_shift.size();

    CMat m(keep_dim, keep_dim);
    for (std::size_t r = 0; r < keep_dim; ++r) {
        for (std::size_t c = 0; c < keep_dim; ++c) {
            std::size_t rbase = 0, cbase = 0;
            for (std::size_t p = 0; p < nk; ++p) {
                rbase |= ((r >> (nk - 1 - p)) & 1u) << keep_shift[p];
                cbase |= ((c >> (nk - 1 - p)) & 1u) << keep_shift[p];
            }
            cplx sum = 0.0;
            for (std::size_t d = 0; d < drop_dim; ++d) {
                std::size_t off = 0;
                for (std::size_t p = 0; p < drop_shift.size(); ++p)
                    off |= ((d >> p) & 1u) << drop_shift[p];
                sum += rho.mat.at(rbase | off, cbase | off);
            }
            m.at(r, c) = sum;
        }
    }
    return DensityOperator(keep, std::move(m));
}

MixedState MixedState::pure(StateVector psi) {
    MixedState m;
    m.components.push_back({1.0, std::move(psi)});
    return m;
}

MixedState MixedState::from_density(const DensityOperator& rho, double tol) {
    auto eig = hermitian_eig(rho.mat);
    MixedState m;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        double w = eig.values[k];
        if (w < -tol) throw InvalidStateError("density matrix has a negative eigenvalue");
        if (w <= tol) continue;
        StateVector psi;
        psi.labels = rho.labels;
        psi.amps.resize(rho.dim());
        for (std::size_t r = 0; r < rho.dim(); ++r) psi.amps[r] = eig.vectors.at(r, k);
        psi.normalize();
        m.components.push_back({w, std::move(psi)});
    }
    return m;
}

const std::vector<Label>& MixedState::labels() const {
    if (components.empty()) throw InvalidStateError("empty ensemble has no registers");
    return components.front().state.labels;
}

double MixedState::total_weight() const {
    double s = 0.0;
    for (const auto& c : components) s += c.weight;
    return s;
}

DensityOperator MixedState::to_density() const {
    if (components.empty()) throw InvalidStateError("empty ensemble");
    const auto& ls = labels();
    CMat m(std::size_t{1} << ls.size(), std::size_t{1} << ls.size());
    for (const auto& c : components) {
        const StateVector aligned = (c.state.labels == ls) ? c.state : c.state.permuted(ls);
        for (std::size_t r = 0; r < m.rows; ++r)
            for (std::size_t col = 0; col < m.cols; ++col)
                m.at(r, col) += c.weight * aligned.amps[r] * std::conj(aligned.amps[col]);
    }
    return DensityOperator(ls, std::move(m));
}

void MixedState::prune(double tol) {
    components.erase(std::remove_if(components.begin(), components.end(),
                                    [&](const Component& c) { return c.weight <= tol; }),
                     components.end());
}

void MixedState::align_labels() {
    if (components.size() < 2) return;
    const auto ls = components.front().state.labels;
    for (auto& c : components)
        if (c.state.labels != ls) c.state = c.state.permuted(ls);
}

MixedState tensor(const MixedState& a, const MixedState& b) {
    MixedState out;
    for (const auto& ca : a.components)
        for (const auto& cb : b.components)
            out.components.push_back({ca.weight * cb.weight, tensor(ca.state, cb.state)});
    return out;
}

}  // namespace qkdmem
