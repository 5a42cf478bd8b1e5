#include "qkdmem/random_states.hpp"

#include <cmath>

namespace qkdmem {

double random_gaussian(Rng& rng) {
    // Box-Muller; u1 is kept away from 0 so the log stays finite.
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

StateVector random_pure_state(std::vector<Label> labels, Rng& rng) {
    StateVector psi;
    psi.labels = std::move(labels);
    psi.amps.resize(std::size_t{1} << psi.labels.size());
    for (auto& a : psi.amps) a = cplx{random_gaussian(rng), random_gaussian(rng)};
    psi.normalize();
    return psi;
}

CMat random_unitary2(Rng& rng) {
    cplx a{random_gaussian(rng), random_gaussian(rng)};
    cplx b{random_gaussian(rng), random_gaussian(rng)};
    double n = std::sqrt(std::norm(a) + std::norm(b));
    a /= n;
    b /= n;
    CMat u(2, 2);
    u.at(0, 0) = a;
    u.at(0, 1) = -std::conj(b);
    u.at(1, 0) = b;
    u.at(1, 1) = std::conj(a);
    return u;
}

Channel random_channel(const Label& l, std::size_t n_kraus, Rng& rng) {
    if (n_kraus == 0) throw QkdError("need at least one Kraus operator");
    std::vector<CMat> raw;
    CMat m(2, 2);
    for (std::size_t i = 0; i < n_kraus; ++i) {
        CMat k(2, 2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c)
                k.at(r, c) = cplx{random_gaussian(rng), random_gaussian(rng)};
        m = m + k.adjoint() * k;
        raw.push_back(std::move(k));
    }
    // M^(-1/2) from the eigendecomposition of the positive matrix M.
    HermitianEig eig = hermitian_eig(m);
    CMat inv_sqrt(2, 2);
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            cplx v = 0.0;
            for (std::size_t k = 0; k < 2; ++k)
                v += eig.vectors.at(r, k) * (1.0 / std::sqrt(eig.values[k])) *
                     std::conj(eig.vectors.at(c, k));
            inv_sqrt.at(r, c) = v;
        }
    }
    Channel ch;
    for (auto& k : raw) ch.kraus.push_back(k * inv_sqrt);
    ch.input_labels = {l};
    ch.output_labels = {l};
    ch.check();
    return ch;
}

}  // namespace qkdmem
