#ifndef HARDY_PICK_HPP
#define HARDY_PICK_HPP

#include <memory>
#include <string>
#include <vector>

#include "hardy/eval.hpp"

namespace hardy {

struct Certificate {
    bool feasible = false;
    double lambda_min = 0.0;
    std::vector<double> block_lambda_min;
    std::vector<Mat> blocks;        // one PSD-tested matrix per block
    double theta_residual = 0.0;    // distance of theta values from sigma(M)'
    double series_residual = 0.0;   // direct solve vs geometric series, when checked
    std::string diagnostics;
};

// theta(a) = eta_i^* (I_E kron a) eta_j on sigma(M)'.
LinearMapOnAlgebra theta_map(const DualCorrespondence& d, const Mat& eta_i, const Mat& eta_j,
                             double* residual = nullptr);
// t = (id - theta)^{-1}. Without allow_nilpotent the spectral radius must be
// below 1; with it, theta must be nilpotent or of spectral radius below 1.
LinearMapOnAlgebra neumann_inverse(const LinearMapOnAlgebra& theta, bool allow_nilpotent = false);
// Partial sums of id + theta + theta^2 + ... until the increment drops below tol.
LinearMapOnAlgebra neumann_series(const LinearMapOnAlgebra& theta, double tol = 1e-15, int max_terms = 100000);

struct PickProblem {
    std::shared_ptr<const DualCorrespondence> dual;
    std::vector<DualPoint> points;
    std::vector<Mat> b, c;
    double psd_tol = kPsdTol;

    int size() const { return static_cast<int>(points.size()); }
    void validate() const;
};

// Complete positivity of ((Ad(B_i,B_j) - Ad(C_i,C_j)) o t_{eta_i,eta_j}) on
// M_k(sigma(M)'). Block t of the certificate is the Choi matrix of block
// M_k kron (block t of sigma(M)'), compressed to its non-zero rows: entry
// ((i,p,alpha),(j,q,beta)) = Psi_ij(e_pq)[alpha,beta]. theta_scale multiplies
// every theta (r^2 in the boundary sweep).
Certificate pick_condition(const PickProblem& p, bool allow_nilpotent = false, double theta_scale = 1.0);

// Direct matrices of the classical special cases.
Certificate scalar_pick(const std::vector<cplx>& z, const std::vector<cplx>& w, double tol = kPsdTol);
Certificate matrix_pick(const std::vector<cplx>& z, const std::vector<Mat>& b, const std::vector<Mat>& c,
                        double tol = kPsdTol);
Certificate ball_pick(const std::vector<Vec>& eta, const std::vector<Mat>& c, double tol = kPsdTol);
// eta_i given by edge coordinates y_i; sigma the identity representation of D_n.
Certificate quiver_pick(const Eigen::MatrixXi& adjacency, const std::vector<Vec>& y, const std::vector<Mat>& c,
                        double tol = kPsdTol);

// The equivalent generic problems.
PickProblem scalar_problem(const std::vector<cplx>& z, const std::vector<cplx>& w);
PickProblem matrix_problem(const std::vector<cplx>& z, const std::vector<Mat>& b, const std::vector<Mat>& c);
PickProblem ball_problem(const std::vector<Vec>& eta, const std::vector<Mat>& c);
PickProblem quiver_problem(const Eigen::MatrixXi& adjacency, const std::vector<Vec>& y, const std::vector<Mat>& c);
Mat quiver_point_raw(const Eigen::MatrixXi& adjacency, const Vec& y);

// C lies in {X(eta^*) : ||X|| <= 1} iff (id - Ad(C,C)) o t_eta is CP.
Certificate membership_test(std::shared_ptr<const DualCorrespondence> dual, const DualPoint& eta, const Mat& c,
                            double tol = kPsdTol);

struct SchwartzReport {
    bool norm_premise = false;      // ||X|| <= 1 + tol
    bool vanishing_premise = false; // X_0 = 0
    double premise_lambda = 0.0;    // lambda_min(a - <eta, a.eta>)
    double first_lambda = 0.0;      // lambda_min(<eta, a.eta> - X a X^*)
    std::vector<double> chain_lambda;  // k = 0..depth-1
    double chain_consistency = 0.0;    // theta^k(I) vs <eta^k, eta^k> from the dual tensor powers
    double third_lambda = 0.0;         // lambda_min(<eta, eta> - X X^*)
    double min_lambda() const;
};

SchwartzReport schwartz_check(const HardyElement& x, std::shared_ptr<const DualCorrespondence> dual,
                              const DualPoint& eta, const Mat& a, int depth = 3, double tol = kPsdTol);

// Nests of C^d given by the ranks of Q_k = P_k - P_{k-1}.
struct Nest {
    std::vector<int> dims;
    int side() const;
    int size() const { return static_cast<int>(dims.size()); }
    Mat projection(int j) const;  // P_j, j = 0..size()
    bool contains_pattern(const Mat& x, double tol = 1e-12) const;
    Mat pattern_mask() const;     // 1 on the block upper triangle
};

Nest nest_from_dims(const std::vector<int>& dims);
// Recovers dims from an increasing chain of coordinate projections; throws on
// non-monotone or non-projection input.
Nest nest_from_projections(const std::vector<Mat>& projections);

Certificate nest_pick_condition(const Nest& nest, const Mat& b, const Mat& c, double tol = kPsdTol);
Certificate nest_vector_condition(const Nest& nest, const std::vector<Vec>& u, const std::vector<Vec>& v,
                                  double tol = kPsdTol);

struct SweepEntry {
    double r = 0.0;
    Certificate certificate;
};
// Constant nets C_i(r) = C_i; conservative.
std::vector<SweepEntry> boundary_sweep(const PickProblem& p, const std::vector<double>& r_grid);

}  // namespace hardy

#endif
