#pragma once

#include <Eigen/Dense>
#include <vector>

#include "epibundle/errors.hpp"

namespace epibundle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Hard cap on the ambient dimension: the subderivative grids are
// exponential in n and every worked case is 1-2 dimensional.
inline constexpr int kMaxAmbientDim = 16;

inline void check_dim(int n) {
    if (n < 0 || n > kMaxAmbientDim)
        throw argument_error("ambient dimension must be in [0," +
                             std::to_string(kMaxAmbientDim) + "], got " +
                             std::to_string(n));
}

// Symmetric matrix. The constructor symmetrizes its input and records the
// Frobenius norm of the skew part, so downstream code can assume exact
// symmetry while the defect stays observable.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(const Mat& a) {
        if (a.rows() != a.cols())
            throw argument_error("SymMatrix: input must be square");
        check_dim(static_cast<int>(a.rows()));
        defect_ = 0.5 * (a - a.transpose()).norm();
        m_ = 0.5 * (a + a.transpose());
    }

    static SymMatrix zero(int n) { return SymMatrix(Mat::Zero(n, n)); }
    static SymMatrix identity(int n) { return SymMatrix(Mat::Identity(n, n)); }

    int order() const { return static_cast<int>(m_.rows()); }
    const Mat& mat() const { return m_; }
    double symmetrization_defect() const { return defect_; }

    double operator()(int i, int j) const { return m_(i, j); }

    double quad(const Vec& x) const {
        if (x.size() != m_.rows())
            throw argument_error("SymMatrix::quad: dimension mismatch");
        return x.dot(m_ * x);
    }

    Eigen::SelfAdjointEigenSolver<Mat> eigens() const {
        return Eigen::SelfAdjointEigenSolver<Mat>(m_);
    }

    double min_eigenvalue() const {
        if (order() == 0) return 0.0;
        return eigens().eigenvalues().minCoeff();
    }

private:
    Mat m_{0, 0};
    double defect_ = 0.0;
};

// Linear subspace of R^n held as an orthonormal basis. Canonicalization
// runs a rank-revealing SVD on whatever spanning set is supplied, with a
// singular-value cutoff of rank_tol relative to the largest singular value,
// so that all equality questions reduce to projector distance.
class Subspace {
public:
    static constexpr double kDefaultRankTol = 1e-8;

    // The zero subspace {0} of R^n.
    static Subspace zero(int n) {
        check_dim(n);
        Subspace s;
        s.ambient_ = n;
        s.basis_ = Mat::Zero(n, 0);
        return s;
    }

    static Subspace full(int n) {
        check_dim(n);
        Subspace s;
        s.ambient_ = n;
        s.basis_ = Mat::Identity(n, n);
        return s;
    }

    // Subspace spanned by the columns of `span` (need not be independent).
    static Subspace span_of(const Mat& span, double rank_tol = kDefaultRankTol) {
        check_dim(static_cast<int>(span.rows()));
        Subspace s;
        s.ambient_ = static_cast<int>(span.rows());
        s.rank_tol_ = rank_tol;
        if (span.cols() == 0) {
            s.basis_ = Mat::Zero(s.ambient_, 0);
            return s;
        }
        Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        double cutoff = rank_tol * (sv.size() > 0 ? sv(0) : 0.0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > cutoff) ++rank;
        s.basis_ = svd.matrixU().leftCols(rank);
        return s;
    }

    static Subspace span_of(const std::vector<Vec>& vecs, int ambient,
                            double rank_tol = kDefaultRankTol) {
        Mat m(ambient, static_cast<Eigen::Index>(vecs.size()));
        for (size_t i = 0; i < vecs.size(); ++i) {
            if (vecs[i].size() != ambient)
                throw argument_error("Subspace::span_of: inconsistent dimensions");
            m.col(static_cast<Eigen::Index>(i)) = vecs[i];
        }
        return span_of(m, rank_tol);
    }

    int ambient_dim() const { return ambient_; }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Mat& basis() const { return basis_; }
    double rank_tol() const { return rank_tol_; }

    bool is_zero() const { return dim() == 0; }
    bool is_full() const { return dim() == ambient_; }

    Mat projector() const { return basis_ * basis_.transpose(); }

    Subspace orthogonal_complement() const {
        Mat p = Mat::Identity(ambient_, ambient_) - projector();
        Subspace c = span_of(p, rank_tol_);
        // Rank of I - P is exact; re-derive it from the known dimension to
        // guard against borderline SVD cutoffs.
        if (c.dim() != ambient_ - dim()) {
            Eigen::JacobiSVD<Mat> svd(p, Eigen::ComputeThinU);
            c.basis_ = svd.matrixU().leftCols(ambient_ - dim());
        }
        return c;
    }

    Vec project(const Vec& w) const {
        if (w.size() != ambient_)
            throw argument_error("Subspace::project: dimension mismatch");
        return basis_ * (basis_.transpose() * w);
    }

    double distance(const Vec& w) const { return (w - project(w)).norm(); }

    bool contains(const Vec& w, double tol) const {
        return distance(w) <= tol * (1.0 + w.norm());
    }

    // Frobenius distance between orthogonal projectors; the metric used for
    // all subspace equality tests and limits.
    double projector_distance(const Subspace& other) const {
        if (other.ambient_ != ambient_)
            throw argument_error("Subspace::projector_distance: ambient mismatch");
        return (projector() - other.projector()).norm();
    }

private:
    int ambient_ = 0;
    Mat basis_{0, 0};
    double rank_tol_ = kDefaultRankTol;
};

}  // namespace epibundle
