#pragma once

#include <optional>
#include <vector>

#include "epibundle/extreal.hpp"
#include "epibundle/linalg.hpp"

namespace epibundle {

// Graph of the subdifferential of a generalized quadratic form: a linear
// subspace of R^{2n} whose dimension equals the ambient dimension n.
struct GraphSubspace {
    Subspace space;   // ambient dimension 2n
    int half_dim = 0; // n

    GraphSubspace(Subspace s, int n) : space(std::move(s)), half_dim(n) {
        if (space.ambient_dim() != 2 * n)
            throw argument_error("GraphSubspace: ambient must be 2n");
        if (space.dim() != n)
            throw numeric_error("GraphSubspace: dimension " +
                                std::to_string(space.dim()) + " != n = " +
                                std::to_string(n));
    }
};

// q(x) = (1/2) <x, A x> + indicator of the subspace L. The representative A
// is canonicalized to P_L A P_L + sigma P_{L-perp} with sigma the smallest
// eigenvalue of A on L, so two forms are equal exactly when their
// subdifferential graphs coincide (A off L is not identifiable).
class GeneralizedQuadraticForm {
public:
    GeneralizedQuadraticForm(const SymMatrix& a, Subspace l)
        : l_(std::move(l)) {
        if (a.order() != l_.ambient_dim())
            throw argument_error("GeneralizedQuadraticForm: A and L dimensions differ");
        a_ = canonicalize(a, l_);
    }

    // The zero form on L = R^n (q identically 0).
    static GeneralizedQuadraticForm zero(int n) {
        return GeneralizedQuadraticForm(SymMatrix::zero(n), Subspace::full(n));
    }

    // Indicator of the origin.
    static GeneralizedQuadraticForm indicator_origin(int n) {
        return GeneralizedQuadraticForm(SymMatrix::zero(n), Subspace::zero(n));
    }

    // 1-D form a*x^2 on R (stored matrix [2a]).
    static GeneralizedQuadraticForm coefficient_form(double a) {
        Mat m(1, 1);
        m(0, 0) = 2.0 * a;
        return GeneralizedQuadraticForm(SymMatrix(m), Subspace::full(1));
    }

    int dim() const { return l_.ambient_dim(); }
    const SymMatrix& matrix() const { return a_; }
    const Subspace& subspace() const { return l_; }

    // For 1-D forms on the full line, the coefficient a with q(x) = a x^2.
    double coefficient_1d() const {
        if (dim() != 1 || !l_.is_full())
            throw argument_error("coefficient_1d: needs a finite form on R");
        return 0.5 * a_(0, 0);
    }

    // Smallest eigenvalue of A restricted to L (0 when L = {0}); q satisfies
    // q(x) >= (sigma/2)|x|^2 on L with sigma this value.
    double floor_on_subspace() const {
        if (l_.is_zero()) return 0.0;
        Mat r = l_.basis().transpose() * a_.mat() * l_.basis();
        return SymMatrix(r).min_eigenvalue();
    }

private:
    static SymMatrix canonicalize(const SymMatrix& a, const Subspace& l) {
        int n = l.ambient_dim();
        if (l.is_zero()) return SymMatrix::zero(n);
        Mat p = l.projector();
        Mat restricted = l.basis().transpose() * a.mat() * l.basis();
        double sigma = SymMatrix(restricted).min_eigenvalue();
        Mat b = p * a.mat() * p + sigma * (Mat::Identity(n, n) - p);
        return SymMatrix(b);
    }

    SymMatrix a_;
    Subspace l_;
};

using GQF = GeneralizedQuadraticForm;

inline ExtReal gqf_eval(const GQF& q, const Vec& x) {
    if (x.size() != q.dim())
        throw argument_error("gqf_eval: dimension mismatch");
    if (q.subspace().distance(x) > q.subspace().rank_tol() * (1.0 + x.norm()))
        return ExtReal::pos_inf();
    return ExtReal(0.5 * q.matrix().quad(x));
}

// Orthonormal basis of gph(subdifferential of q)
//   = { (x, A x + z) : x in L, z in L-perp },
// a subspace of dimension n in R^{2n}.
inline GraphSubspace gqf_graph(const GQF& q) {
    int n = q.dim();
    const Subspace& l = q.subspace();
    Subspace lperp = l.orthogonal_complement();
    Mat span(2 * n, n);
    int col = 0;
    for (int i = 0; i < l.dim(); ++i, ++col) {
        Vec b = l.basis().col(i);
        span.col(col).head(n) = b;
        span.col(col).tail(n) = q.matrix().mat() * b;
    }
    for (int j = 0; j < lperp.dim(); ++j, ++col) {
        span.col(col).head(n).setZero();
        span.col(col).tail(n) = lperp.basis().col(j);
    }
    return GraphSubspace(Subspace::span_of(span), n);
}

// Frobenius distance between the subdifferential-graph projectors of two
// forms; the equality metric for all form comparisons.
inline double gqf_graph_distance(const GQF& a, const GQF& b) {
    return gqf_graph(a).space.projector_distance(gqf_graph(b).space);
}

inline bool gqf_equal(const GQF& a, const GQF& b, double tol = 1e-6) {
    return a.dim() == b.dim() && gqf_graph_distance(a, b) <= tol;
}

// Unique solution of { x in L, M x - w in L-perp } for positive-definite M,
// via x = B (B^T M B)^{-1} B^T w with B an orthonormal basis of L.
inline Vec solve_constrained(const SymMatrix& m, const Subspace& l, const Vec& w) {
    if (l.is_zero())
        throw argument_error("solve_constrained: L must be nonzero");
    if (m.order() != l.ambient_dim() || w.size() != m.order())
        throw argument_error("solve_constrained: dimension mismatch");
    if (m.min_eigenvalue() <= 0.0)
        throw argument_error("solve_constrained: M is not positive-definite");
    const Mat& b = l.basis();
    Mat core = b.transpose() * m.mat() * b;
    Eigen::LDLT<Mat> ldlt(core);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw numeric_error("solve_constrained: B^T M B is singular");
    return b * ldlt.solve(b.transpose() * w);
}

// Extends A | L with floor sigma to all of R^n:
//   B = P_L A P_L + sigma P_{L-perp},
// so <w,Bw> = <w,Aw> on L and <w,Bw> >= sigma |w|^2 everywhere.
inline SymMatrix eigenfloor_extension(const SymMatrix& a, const Subspace& l,
                                      double sigma) {
    int n = a.order();
    if (n != l.ambient_dim())
        throw argument_error("eigenfloor_extension: dimension mismatch");
    if (!l.is_zero()) {
        Mat restricted = l.basis().transpose() * a.mat() * l.basis();
        Eigen::SelfAdjointEigenSolver<Mat> es(restricted);
        double lo = es.eigenvalues().minCoeff();
        double tol = 1e-9 * (1.0 + a.mat().norm());
        if (lo < sigma - tol) {
            int idx;
            es.eigenvalues().minCoeff(&idx);
            Vec dir = l.basis() * es.eigenvectors().col(idx);
            throw argument_error(
                "eigenfloor_extension: <w,Aw> = " + std::to_string(lo) +
                " < sigma = " + std::to_string(sigma) +
                " along direction (" + std::to_string(dir(0)) + ", ...)");
        }
    }
    Mat p = l.projector();
    Mat b = p * a.mat() * p + sigma * (Mat::Identity(n, n) - p);
    return SymMatrix(b);
}

// Closed-form Moreau envelope of a generalized quadratic form: returns the
// symmetric Q with
//   e_lambda[q](w) = (1/2) <w, Q w>,
// where Q = M B M + (1/lambda)(M - I)^2 and
// M = (1/lambda) C (C^T (B + I/lambda) C)^{-1} C^T for C a basis of L and B
// the eigenfloor extension of A with floor -r. L = {0} short-circuits to
// Q = (1/lambda) I.
//
// Requires q >= -(r/2)|.|^2 on L and lambda < 1/r when r > 0.
inline SymMatrix moreau_of_gqf(const GQF& q, double lambda, double floor_r = 0.0) {
    int n = q.dim();
    if (!(lambda > 0.0))
        throw argument_error("moreau_of_gqf: lambda must be > 0");
    if (floor_r < 0.0)
        throw argument_error("moreau_of_gqf: floor must be >= 0");
    if (floor_r > 0.0 && !(lambda < 1.0 / floor_r))
        throw argument_error("moreau_of_gqf: need lambda < 1/r");
    if (q.subspace().is_zero())
        return SymMatrix(Mat::Identity(n, n) / lambda);

    SymMatrix b = eigenfloor_extension(q.matrix(), q.subspace(), -floor_r);
    const Mat& c = q.subspace().basis();
    Mat shifted = b.mat() + Mat::Identity(n, n) / lambda;
    Mat core = c.transpose() * shifted * c;
    Eigen::SelfAdjointEigenSolver<Mat> es(core);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw numeric_error("moreau_of_gqf: C^T (B + I/lambda) C is not PD");
    Mat m = (c * core.ldlt().solve(c.transpose())) / lambda;
    Mat identity = Mat::Identity(n, n);
    Mat qmat = m * b.mat() * m + (m - identity) * (m - identity) / lambda;
    return SymMatrix(qmat);
}

namespace detail {

// Recovers the form whose subdifferential graph is the given n-dimensional
// subspace of R^{2n}: L is the span of the primal components; the matrix is
// fitted on L from pairs (u, v) via q(u) = (1/2) <u, v>. Errors when the
// subspace is not a self-adjoint graph. The basis columns are unit vectors,
// so the split between primal span and vertical fiber is judged at an
// absolute scale: a graph tilted within split_tol of vertical collapses to
// the indicator directions.
inline GQF form_from_graph_subspace(const Subspace& s, int n, double tol = 1e-7,
                                    double split_tol = 1e-7) {
    if (s.ambient_dim() != 2 * n || s.dim() != n)
        throw numeric_error("form_from_graph_subspace: not an n-dimensional graph");
    Mat u = s.basis().topRows(n);
    Mat v = s.basis().bottomRows(n);

    Eigen::JacobiSVD<Mat> usvd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = usvd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > split_tol) ++rank;
    Subspace l = rank == 0 ? Subspace::zero(n)
                           : Subspace::span_of(Mat(usvd.matrixU().leftCols(rank)));

    // The fiber over u = 0 must lie in L-perp (self-adjointness).
    for (int i = rank; i < usvd.matrixV().cols(); ++i) {
        Vec fiber = v * usvd.matrixV().col(i);
        if (l.project(fiber).norm() > tol * (1.0 + fiber.norm()))
            throw numeric_error("form_from_graph_subspace: fiber not orthogonal to L");
    }

    if (l.is_zero())
        return GQF(SymMatrix::zero(n), l);

    // For each basis vector c_i of L pick the pseudo-inverse preimage y with
    // U y = c_i; G_ij = <c_i, V y_j> is preimage-independent for a valid
    // graph because preimages differ by fiber directions.
    const Mat& c = l.basis();
    int m = l.dim();
    Mat g(m, m);
    for (int j = 0; j < m; ++j) {
        Vec rotated = usvd.matrixU().transpose() * c.col(j);
        Vec y = Vec::Zero(u.cols());
        for (int i = 0; i < rank; ++i)
            y += (rotated(i) / sv(i)) * usvd.matrixV().col(i);
        Vec vj = v * y;
        for (int i = 0; i < m; ++i) g(i, j) = c.col(i).dot(vj);
    }
    double asym = (g - g.transpose()).norm();
    if (asym > tol * (1.0 + g.norm()))
        throw numeric_error("form_from_graph_subspace: graph is not self-adjoint "
                            "(defect " + std::to_string(asym) + ")");
    Mat gs = 0.5 * (g + g.transpose());
    Mat a = c * gs * c.transpose();
    return GQF(SymMatrix(a), l);
}

}  // namespace detail

// Inverts the closed-form envelope map: given the Hessian H of the envelope
// at the base point, rebuilds the graph subspace
//   S = { ((I - lambda H) w, H w) : w in R^n },
// reads off L = range(I - lambda H), and fits the form from the pairs in S.
// Round trip: moreau_of_gqf(result, lambda) == H. split_tol decides when a
// direction of I - lambda H counts as collapsed (callers with inexact H pass
// their accuracy here, so near-indicator forms land on the indicator).
inline GQF gqf_from_envelope_hessian(const SymMatrix& h, double lambda,
                                     double split_tol = 1e-7) {
    if (!(lambda > 0.0))
        throw argument_error("gqf_from_envelope_hessian: lambda must be > 0");
    int n = h.order();
    Mat top = Mat::Identity(n, n) - lambda * h.mat();
    Mat span(2 * n, n);
    span.topRows(n) = top;
    span.bottomRows(n) = h.mat();
    Subspace s = Subspace::span_of(span);
    if (s.dim() != n)
        throw numeric_error("gqf_from_envelope_hessian: graph rank deficient");
    // The basis normalization shrinks the primal block by at most the column
    // norms; rescale the split accordingly.
    double col_scale = std::sqrt(1.0 + h.mat().norm() * h.mat().norm());
    return detail::form_from_graph_subspace(s, n, 1e-7,
                                            split_tol / col_scale);
}

struct EpiLimitOptions {
    double cauchy_tol = 1e-6;   // hard Cauchy tolerance on trailing projectors
    double trend_ratio = 0.95;  // decay ratio admitting geometric extrapolation
    double trend_floor = 0.05;  // last consecutive distance must be below this
    double split_tol = 1e-7;    // vertical-split tolerance for form recovery
};

// Epigraphical limit of a sequence of forms, computed as the limit of their
// subdifferential-graph projectors in Frobenius norm. Each form must satisfy
// q_k >= -(r/2)|.|^2 on its subspace. Returns nullopt when the trailing half
// of the projector sequence neither settles within cauchy_tol nor decays
// geometrically (geometric tails are extrapolated before recovery).
inline std::optional<GQF> gqf_epi_limit(const std::vector<GQF>& seq,
                                        double floor_r,
                                        const EpiLimitOptions& opts = {}) {
    if (seq.empty())
        throw argument_error("gqf_epi_limit: empty sequence");
    if (floor_r < 0.0)
        throw argument_error("gqf_epi_limit: floor must be >= 0");
    int n = seq.front().dim();
    std::vector<Mat> projectors;
    projectors.reserve(seq.size());
    for (const auto& q : seq) {
        if (q.dim() != n)
            throw argument_error("gqf_epi_limit: mixed dimensions");
        if (q.floor_on_subspace() < -floor_r - 1e-9 * (1.0 + std::abs(floor_r)))
            throw argument_error("gqf_epi_limit: form violates the -r floor");
        projectors.push_back(gqf_graph(q).space.projector());
    }
    if (seq.size() == 1)
        return seq.front();

    size_t start = seq.size() / 2;
    if (start == 0) start = 1;
    std::vector<double> d;
    for (size_t k = start; k < seq.size(); ++k)
        d.push_back((projectors[k] - projectors[k - 1]).norm());

    double dmax = 0.0;
    for (double x : d) dmax = std::max(dmax, x);

    Mat limit = projectors.back();
    if (dmax > opts.cauchy_tol) {
        // Geometric tail: consecutive distances must shrink level over level.
        bool decaying = d.size() >= 2;
        double ratio_acc = 0.0;
        int ratio_cnt = 0;
        for (size_t i = 1; i < d.size(); ++i) {
            if (d[i] > opts.trend_ratio * d[i - 1] + opts.cauchy_tol) decaying = false;
            if (d[i - 1] > 1e-14) {
                ratio_acc += d[i] / d[i - 1];
                ++ratio_cnt;
            }
        }
        if (!decaying || d.back() > opts.trend_floor) return std::nullopt;
        double rho = ratio_cnt > 0 ? std::min(0.9, ratio_acc / ratio_cnt) : 0.5;
        Mat prev = projectors[projectors.size() - 2];
        limit = limit + (limit - prev) * (rho / (1.0 - rho));
    }

    // Snap the (possibly extrapolated) matrix back to a rank-n projector.
    Mat sym = 0.5 * (limit + limit.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    Mat basis(2 * n, n);
    for (int i = 0; i < n; ++i)
        basis.col(i) = es.eigenvectors().col(2 * n - 1 - i);
    Subspace s = Subspace::span_of(basis);
    if (s.dim() != n) return std::nullopt;
    try {
        return detail::form_from_graph_subspace(s, n, 1e-5, opts.split_tol);
    } catch (const numeric_error&) {
        return std::nullopt;
    }
}

}  // namespace epibundle
