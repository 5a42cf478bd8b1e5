#include "qkdmem/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qkdmem {

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CMat CMat::adjoint() const {
    CMat m(cols, rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.at(c, r) = std::conj(at(r, c));
    return m;
}

cplx CMat::trace() const {
    assert(rows == cols);
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows; ++i) t += at(i, i);
    return t;
}

double CMat::max_abs_diff(const CMat& other) const {
    assert(rows == other.rows && cols == other.cols);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - other.a[i]));
    return d;
}

bool CMat::is_hermitian(double tol) const {
    if (rows != cols) return false;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = r; c < cols; ++c)
            if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
    return true;
}

CMat operator*(const CMat& x, const CMat& y) {
    assert(x.cols == y.rows);
    CMat m(x.rows, y.cols);
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t k = 0; k < x.cols; ++k) {
            cplx v = x.at(r, k);
            if (v == cplx{}) continue;
            for (std::size_t c = 0; c < y.cols; ++c) m.at(r, c) += v * y.at(k, c);
        }
    }
    return m;
}

CMat operator+(const CMat& x, const CMat& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    CMat m = x;
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += y.a[i];
    return m;
}

CMat operator-(const CMat& x, const CMat& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    CMat m = x;
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] -= y.a[i];
    return m;
}

CMat operator*(cplx s, const CMat& x) {
    CMat m = x;
    for (auto& v : m.a) v *= s;
    return m;
}

CMat kron(const CMat& x, const CMat& y) {
    CMat m(x.rows * y.rows, x.cols * y.cols);
    for (std::size_t rx = 0; rx < x.rows; ++rx)
        for (std::size_t cx = 0; cx < x.cols; ++cx) {
            cplx v = x.at(rx, cx);
            if (v == cplx{}) continue;
            for (std::size_t ry = 0; ry < y.rows; ++ry)
                for (std::size_t cy = 0; cy < y.cols; ++cy)
                    m.at(rx * y.rows + ry, cx * y.cols + cy) = v * y.at(ry, cy);
        }
    return m;
}

CMat outer(const std::vector<cplx>& ket, const std::vector<cplx>& bra) {
    CMat m(ket.size(), bra.size());
    for (std::size_t r = 0; r < ket.size(); ++r)
        for (std::size_t c = 0; c < bra.size(); ++c) m.at(r, c) = ket[r] * std::conj(bra[c]);
    return m;
}

namespace {

double off_diagonal_norm(const CMat& m) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c)
            if (r != c) s += std::norm(m.at(r, c));
    return std::sqrt(s);
}

}  // namespace

HermitianEig hermitian_eig(const CMat& input) {
    assert(input.rows == input.cols);
    const std::size_t n = input.rows;
    CMat m = input;
    CMat v = CMat::identity(n);

    // Cyclic Jacobi with complex plane rotations. Each sweep annihilates
    // every off-diagonal element once; quadratic convergence after a few
    // sweeps for the small matrices used here.
    const int max_sweeps = 100;
    const double stop = 1e-14 * std::max(1.0, std::abs(input.trace()));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(m) <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                cplx apq = m.at(p, q);
                double mag = std::abs(apq);
                if (mag < 1e-300) continue;
                cplx phase = apq / mag;
                double app = m.at(p, p).real();
                double aqq = m.at(q, q).real();
                double tau = (aqq - app) / (2.0 * mag);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // Columns: col_p' = c*col_p - s*conj(phase)*col_q,
                //          col_q' = s*phase*col_p + c*col_q, applied as m' = J^dag m J.
                for (std::size_t k = 0; k < n; ++k) {
                    cplx mkp = m.at(k, p), mkq = m.at(k, q);
                    m.at(k, p) = c * mkp - s * std::conj(phase) * mkq;
                    m.at(k, q) = s * phase * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    cplx mpk = m.at(p, k), mqk = m.at(q, k);
                    m.at(p, k) = c * mpk - s * phase * mqk;
                    m.at(q, k) = s * std::conj(phase) * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    cplx vkp = v.at(k, p), vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * std::conj(phase) * vkq;
                    v.at(k, q) = s * phase * vkp + c * vkq;
                }
            }
        }
    }

    HermitianEig out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = m.at(i, i).real();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });

    HermitianEig sorted;
    sorted.values.resize(n);
    sorted.vectors = CMat(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted.values[k] = out.values[order[k]];
        for (std::size_t r = 0; r < n; ++r) sorted.vectors.at(r, k) = v.at(r, order[k]);
    }
    return sorted;
}

std::vector<double> hermitian_eigenvalues(const CMat& m) { return hermitian_eig(m).values; }

}  // namespace qkdmem
