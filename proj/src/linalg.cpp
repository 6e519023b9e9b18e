#include "mziforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mziforge {

namespace {

constexpr double kJacobiTol = 1e-15;
constexpr int kMaxSweeps = 60;

double column_norm_sq(const ComplexMatrix& m, std::size_t j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += std::norm(m.at(i, j));
    return acc;
}

cplx column_dot(const ComplexMatrix& m, std::size_t p, std::size_t q) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += std::conj(m.at(i, p)) * m.at(i, q);
    return acc;
}

// Orthonormal completion: fill column j of u with a unit vector orthogonal
// to columns [0, j). Among canonical basis candidates the one with the
// largest residual after Gram-Schmidt is kept (its norm is at least
// 1/sqrt(m), so this never degenerates).
void complete_column(ComplexMatrix& u, std::size_t j) {
    const std::size_t m = u.rows();
    std::vector<cplx> best;
    double best_norm = 0.0;
    for (std::size_t cand = 0; cand < m; ++cand) {
        std::vector<cplx> v(m, 0.0);
        v[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < m; ++i) proj += std::conj(u.at(i, k)) * v[i];
                for (std::size_t i = 0; i < m; ++i) v[i] -= proj * u.at(i, k);
            }
        }
        double nrm = 0.0;
        for (const cplx& x : v) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        if (nrm > best_norm) {
            best_norm = nrm;
            best = std::move(v);
        }
    }
    if (best_norm < 1e-6) throw std::runtime_error("svd: failed to complete orthonormal basis");
    for (std::size_t i = 0; i < m; ++i) u.at(i, j) = best[i] / best_norm;
}

// SVD for rows >= cols via one-sided Jacobi on the columns.
SvdResult svd_tall(const ComplexMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    ComplexMatrix w = a;
    ComplexMatrix v = ComplexMatrix::identity(n);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = column_norm_sq(w, p);
                const double aqq = column_norm_sq(w, q);
                const cplx gamma = column_dot(w, p, q);
                const double g = std::abs(gamma);
                if (g <= kJacobiTol * std::sqrt(app * aqq) || g == 0.0) continue;
                rotated = true;

                const double alpha = std::arg(gamma);
                const double tau = (aqq - app) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                const cplx ph = std::polar(1.0, -alpha);

                for (std::size_t i = 0; i < m; ++i) {
                    const cplx wp = w.at(i, p), wq = w.at(i, q);
                    w.at(i, p) = c * wp - s * ph * wq;
                    w.at(i, q) = s * wp + c * ph * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vp = v.at(i, p), vq = v.at(i, q);
                    v.at(i, p) = c * vp - s * ph * vq;
                    v.at(i, q) = s * vp + c * ph * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_norm_sq(w, j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    const double sig_max = sigma.empty() ? 0.0 : sigma[order[0]];
    const double rank_tol = sig_max * static_cast<double>(std::max(m, n)) * 1e-15;

    SvdResult out;
    out.u = ComplexMatrix(m, m);
    out.v_h = ComplexMatrix(n, n);
    out.singular_values.resize(n);

    std::size_t filled = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.singular_values[k] = sigma[src];
        for (std::size_t i = 0; i < n; ++i) out.v_h.at(k, i) = std::conj(v.at(i, src));
        if (sigma[src] > rank_tol) {
            for (std::size_t i = 0; i < m; ++i) out.u.at(i, k) = w.at(i, src) / sigma[src];
            ++filled;
        }
    }
    // Null-space columns of u (rank deficiency and the m > n tail).
    for (std::size_t k = filled; k < n; ++k) complete_column(out.u, k);
    for (std::size_t k = n; k < m; ++k) complete_column(out.u, k);
    return out;
}

} // namespace

SvdResult svd(const ComplexMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0)
        throw std::invalid_argument("svd: matrix must have at least one row and column");
    if (!a.all_finite())
        throw std::invalid_argument("svd: input has non-finite entries");
    if (a.rows() >= a.cols()) return svd_tall(a);
    // A = (A^H)^H: decompose the tall conjugate transpose and swap factors.
    SvdResult t = svd_tall(a.hermitian());
    SvdResult out;
    out.u = t.v_h.hermitian();
    out.v_h = t.u.hermitian();
    out.singular_values = std::move(t.singular_values);
    return out;
}

double unitarity_error(const ComplexMatrix& u) {
    if (u.rows() != u.cols())
        throw std::invalid_argument("unitarity_error: matrix is not square");
    const std::size_t n = u.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += u.at(i, k) * std::conj(u.at(j, k));
            if (i == j) acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

ComplexMatrix dft2_shifted(const RealMatrix& image) {
    const std::size_t h = image.rows();
    const std::size_t w = image.cols();
    if (h == 0 || w == 0)
        throw std::invalid_argument("dft2_shifted: empty image");
    constexpr double two_pi = 2.0 * std::numbers::pi;

    // Row transform, then column transform.
    ComplexMatrix rowft(h, w);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t kv = 0; kv < w; ++kv) {
            cplx acc = 0.0;
            for (std::size_t c = 0; c < w; ++c)
                acc += image.at(r, c) *
                       std::polar(1.0, -two_pi * static_cast<double>(kv * c % w) / static_cast<double>(w));
            rowft.at(r, kv) = acc;
        }

    ComplexMatrix full(h, w);
    for (std::size_t ku = 0; ku < h; ++ku)
        for (std::size_t kv = 0; kv < w; ++kv) {
            cplx acc = 0.0;
            for (std::size_t r = 0; r < h; ++r)
                acc += rowft.at(r, kv) *
                       std::polar(1.0, -two_pi * static_cast<double>(ku * r % h) / static_cast<double>(h));
            full.at(ku, kv) = acc;
        }

    // Move DC to the central bin.
    ComplexMatrix shifted(h, w);
    for (std::size_t p = 0; p < h; ++p)
        for (std::size_t q = 0; q < w; ++q)
            shifted.at(p, q) = full.at((p + h - h / 2) % h, (q + w - w / 2) % w);
    return shifted;
}

} // namespace mziforge
