#ifndef HARDY_CORR_HPP
#define HARDY_CORR_HPP

#include <vector>

#include "hardy/matalg.hpp"

namespace hardy {

// Finite-dimensional correspondence over a multi-matrix algebra M. Vectors are
// coordinate columns in a basis that is orthonormal for the scalar product
// tau(<x, y>), tau the block-trace of M. The M-valued inner product is
//   <x, y> = sum_u (x^* G_u y) e_u,
// conjugate-linear in x. Left action phi(a) and right action x -> x.a are
// stored on matrix units.
class Correspondence {
public:
    Correspondence() = default;
    Correspondence(MultiMatrixAlgebra base, int dim, std::vector<Mat> inner_units, std::vector<Mat> left_units,
                   std::vector<Mat> right_units);

    const MultiMatrixAlgebra& base() const { return base_; }
    int dim() const { return dim_; }

    const std::vector<Mat>& inner_units() const { return inner_; }
    const std::vector<Mat>& left_units() const { return left_; }
    const std::vector<Mat>& right_units() const { return right_; }

    Mat inner(const Vec& x, const Vec& y) const;
    Mat left(const Mat& a) const;
    Mat right(const Mat& a) const;
    Mat scalar_gram() const;

private:
    MultiMatrixAlgebra base_;
    int dim_ = 0;
    std::vector<Mat> inner_, left_, right_;
};

struct QuotientCorrespondence {
    Correspondence corr;
    Quotient map;  // raw coordinates -> corr coordinates
};

// Quotient of a raw bimodule by the null space of its semi-definite inner product.
QuotientCorrespondence quotient_correspondence(const MultiMatrixAlgebra& base, const std::vector<Mat>& raw_inner,
                                               const std::vector<Mat>& raw_left, const std::vector<Mat>& raw_right);

// E realized inside B(C^side, C^range): <T, S> = T^* S must lie in M, the left
// action is a *-representation psi of M on C^range and the right action is T a.
struct Realization {
    std::vector<Mat> ops;         // range x side, one per basis vector of E
    std::vector<Mat> left_units;  // psi(e_u), range x range
    int range_dim = 0;
};

struct RealizedCorrespondence {
    Correspondence corr;
    Realization realization;
};

RealizedCorrespondence correspondence_from_operators(const MultiMatrixAlgebra& base, const std::vector<Mat>& ops,
                                                     const std::vector<Mat>& left_units);

Correspondence identity_correspondence(const MultiMatrixAlgebra& m);
Realization identity_realization(const MultiMatrixAlgebra& m);

struct QuiverEdge {
    int i, j, k;  // e^{(k)}_{ij}: left vertex i, right vertex j
};
std::vector<QuiverEdge> quiver_edges(const Eigen::MatrixXi& adjacency);
Correspondence correspondence_from_quiver(const Eigen::MatrixXi& adjacency);
Realization quiver_realization(const Eigen::MatrixXi& adjacency);

struct NestCorrespondence {
    Correspondence corr;
    Realization realization;   // superdiagonal matrix units acting on C^d
    std::vector<int> dims;     // ranks of Q_k
    bool trivial = false;      // fewer than two blocks, E = 0
    int side() const;
    Mat projection(int j) const;  // P_j = Q_1 + ... + Q_j
    Mat block_projection(int k) const;  // Q_k, 1-based
};
NestCorrespondence correspondence_from_nest(const std::vector<int>& dims);

// E = C_n(B(C^h)) over B(C^h), realized as maps C^h -> C^n kron C^h.
RealizedCorrespondence column_space_correspondence(int h, int n);

// E = M kron_P M for a unital completely positive P on M.
Correspondence correspondence_from_cp_map(const MultiMatrixAlgebra& m, const LinearMapOnAlgebra& p);

// E kron_sigma H; raw index i * dim(H) + alpha.
struct InteriorTensor {
    int raw_dim = 0;
    int h = 0;
    Mat quotient, lift;
    std::vector<Mat> left_units;  // (sigma^E o phi)(e_u) on the quotient
    double balance_residual = 0.0;

    int dim() const { return static_cast<int>(quotient.rows()); }
    Mat transport(const Mat& raw_op) const { return quotient * raw_op * lift; }
    Mat left(const Mat& a, const MultiMatrixAlgebra& m) const;
    // I_E kron b for b in sigma(M)'.
    Mat commutant_action(const Mat& b) const;
    // h -> x kron h.
    Mat creation(const Vec& x) const;
};

InteriorTensor interior_tensor(const Correspondence& e, const NormalRep& sigma);

// E kron_M F; raw index i * dim(F) + j.
struct TensorProduct {
    QuotientCorrespondence product;
    double balance_residual = 0.0;
};
TensorProduct interior_tensor(const Correspondence& e, const Correspondence& f);

// The sigma-dual: intertwiners eta: H -> E kron_sigma H, as a correspondence
// over sigma(M)'.
struct DualCorrespondence {
    NormalRep sigma;
    Commutant comm;
    InteriorTensor eh;
    std::vector<Mat> maps;  // basis, orthonormal for tau'(<eta, zeta>)
    Correspondence corr;
    Mat hs_gram_inverse;
    double inner_residual = 0.0;

    int dim() const { return static_cast<int>(maps.size()); }
    Vec coords(const Mat& eta) const;
    Mat map(const Vec& c) const;
    double intertwining_residual(const Mat& eta) const;
};

DualCorrespondence dual_correspondence(const Correspondence& e, const NormalRep& sigma);

struct DualPoint {
    Mat map;  // H -> E kron_sigma H in quotient coordinates
    double norm = 0.0;
};

DualPoint make_point(const DualCorrespondence& d, const Mat& eta, double tol = 1e-10);
// raw: (dim E * dim H) x dim H in raw interior-tensor coordinates.
DualPoint point_from_raw(const DualCorrespondence& d, const Mat& raw, double tol = 1e-10);
// sigma must be the identity representation of M on C^side; v: C^side -> C^range.
DualPoint point_from_realization(const DualCorrespondence& d, const Realization& r, const Mat& v,
                                 double tol = 1e-10);
// The map T kron h -> T h as an operator E kron_sigma H -> C^range.
Mat realization_map(const DualCorrespondence& d, const Realization& r);

struct DoubleDualReport {
    int dim_e = 0, dim_dual = 0, dim_double_dual = 0;
    double mu_unitary = 0.0;        // max of ||mu^* mu - I||, ||mu mu^* - I||
    double w_isometry = 0.0;        // max |<W x, W y> - sigma(<x, y>)|
    double w_bimodule = 0.0;        // W(a.x.b) - (I kron sigma(a)) W(x) sigma(b)
    double w_intertwining = 0.0;    // W(x) lies in the second dual
    double w_rank_defect = 0.0;     // dim E - rank of W
    double commutant_residual = 0.0;
    bool passed(double tol) const;
};

DoubleDualReport double_dual_check(const Correspondence& e, const NormalRep& sigma);

}  // namespace hardy

#endif
