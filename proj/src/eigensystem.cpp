#include "mvd/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mvd/kernels.hpp"

namespace mvd {

AutocorrMatrix autocorrelation(const MultivariateSignal& x) {
    if (x.sensor_count() < 1 || x.sample_count() < 1)
        throw InvalidArgument("autocorrelation needs a nonempty signal");
    return AutocorrMatrix{kernels::omp::autocorrelation(x.data)};
}

namespace {

double off_diagonal_norm(const CMatrix& a) {
    double acc = 0.0;
    for (Eigen::Index q = 0; q < a.cols(); ++q)
        for (Eigen::Index p = 0; p < a.rows(); ++p)
            if (p != q) acc += std::norm(a(p, q));
    return std::sqrt(acc);
}

// Zero a(p,q) with the unitary J = D·P·Dᴴ, where D rotates the phase of
// a(p,q) away and P is the real Jacobi rotation.
void rotate(CMatrix& a, CMatrix& v, Eigen::Index p, Eigen::Index q) {
    const cplx apq = a(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;
    const cplx e = apq / mag;
    const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cplx s_e = s * e;
    const cplx s_ec = s * std::conj(e);

    const double app = a(p, p).real() - t * mag;
    const double aqq = a(q, q).real() + t * mag;
    const Eigen::Index n = a.rows();

    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx akp = a(k, p);
        const cplx akq = a(k, q);
        a(k, p) = c * akp - s_ec * akq;
        a(k, q) = s_e * akp + c * akq;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx apk = a(p, k);
        const cplx aqk = a(q, k);
        a(p, k) = c * apk - s_e * aqk;
        a(q, k) = s_ec * apk + c * aqk;
    }
    a(p, p) = app;
    a(q, q) = aqq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;

    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx vkp = v(k, p);
        const cplx vkq = v(k, q);
        v(k, p) = c * vkp - s_ec * vkq;
        v(k, q) = s_e * vkp + c * vkq;
    }
}

void canonicalize_phase(CMatrix& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        Eigen::Index best = 0;
        double best_mag = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const double m = std::abs(v(i, j));
            if (m > best_mag) {
                best_mag = m;
                best = i;
            }
        }
        if (best_mag > 0.0) {
            v.col(j) *= std::conj(v(best, j)) / best_mag;
            v(best, j) = v(best, j).real();  // drop the rounding residue
        }
    }
}

}  // namespace

EigenSystem hermitian_eig(const AutocorrMatrix& r, const JacobiOptions& opts) {
    const CMatrix& in = r.values;
    if (in.rows() != in.cols()) throw InvalidArgument("matrix is not square");
    const Eigen::Index n = in.rows();
    const double norm = in.norm();
    if ((in - in.adjoint()).norm() > 1e-8 * norm)
        throw InvalidArgument("matrix is not Hermitian");

    CMatrix a = 0.5 * (in + in.adjoint());
    CMatrix v = CMatrix::Identity(n, n);

    if (norm > 0.0) {
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            if (off_diagonal_norm(a) <= opts.tol * norm) break;
            for (Eigen::Index p = 0; p + 1 < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
        }
        if (off_diagonal_norm(a) > opts.tol * norm)
            throw NumericalError("Jacobi eigensolver did not converge");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return a(i, i).real() > a(j, j).real();
    });

    EigenSystem es;
    es.eigenvalues.resize(n);
    es.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        es.eigenvalues[k] = a(order[k], order[k]).real();
        es.eigenvectors.col(k) = v.col(order[k]);
    }
    canonicalize_phase(es.eigenvectors);
    return es;
}

int significant_rank(const EigenSystem& es, double rel_threshold) {
    if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
        throw InvalidArgument("rank threshold must be in (0, 1)");
    if (es.size() == 0 || es.eigenvalues[0] <= 0.0) return 0;
    const double cut = rel_threshold * es.eigenvalues[0];
    int count = 0;
    for (Eigen::Index i = 0; i < es.size(); ++i)
        if (es.eigenvalues[i] >= cut) ++count;
    return count;
}

RVector autocorrelation_spectrum(const MultivariateSignal& x) {
    const Eigen::Index n = x.sample_count();
    const Eigen::Index s = x.sensor_count();
    // Gram over the smaller dimension; the other side's extra eigenvalues are 0.
    const CMatrix gram = s <= n ? CMatrix(x.data.conjugate() * x.data.transpose())
                                : kernels::omp::autocorrelation(x.data);
    const Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
    RVector ev = solver.eigenvalues();
    RVector out = RVector::Zero(n);
    for (Eigen::Index i = 0; i < ev.size(); ++i) out[i] = ev[ev.size() - 1 - i];
    return out;
}

}  // namespace mvd
