#ifndef HARDY_SOLVE_HPP
#define HARDY_SOLVE_HPP

#include <functional>
#include <string>
#include <vector>

#include "hardy/pick.hpp"

namespace hardy {

// f = num / den, coefficients in ascending powers.
struct SchurFunction {
    std::vector<cplx> num, den;
    double boundary_max = 0.0;           // max |f| over the boundary sample
    double interpolation_residual = 0.0; // max_i |f(z_i) - w_i|

    cplx operator()(cplx z) const;
    double sample_boundary(int samples = 512) const;
};

SchurFunction schur_interpolate(const std::vector<cplx>& z, const std::vector<cplx>& w, double tol = 1e-9);

enum class SolveStatus { Solved, Infeasible, Undecided };
const char* to_string(SolveStatus s);

// Dykstra's alternating projections between an affine set A and a convex set U.
// accept(y) is consulted on each iterate y in A and stops the run early.
struct DykstraRun {
    Mat x;                     // last iterate in A
    std::vector<double> gaps;  // ||y_k - x_{k+1}|| per sweep
    int iterations = 0;
    bool accepted = false;
    bool converged = false;
    // Gap sequence non-increasing after the first ten sweeps (relative slack 1e-9).
    bool monotone_after(int burn_in = 10) const;
};
DykstraRun dykstra(const std::function<Mat(const Mat&)>& project_affine,
                   const std::function<Mat(const Mat&)>& project_convex, const Mat& start, double tol, int max_iter,
                   const std::function<bool(const Mat&)>& accept = {});

// Projection onto {||X|| <= radius} by clipping singular values.
Mat clip_singular_values(const Mat& x, double radius = 1.0);

struct NestSolveResult {
    SolveStatus status = SolveStatus::Undecided;
    Mat x;
    double norm = 0.0, residual = 0.0;
    int iterations = 0;
    double final_gap = 0.0;
    bool gap_monotone = true;
    Certificate certificate;
};

// X in Alg N with ||X|| <= 1 and BX = C. Throws InvalidSpec when BX = C has no
// solution at all, before any pattern is imposed. With gate = false the
// iteration runs even when the certificate fails, which is how the certificate
// and the solver are compared: Solved alongside a failed certificate is a
// contradiction.
NestSolveResult nest_feasibility_solve(const Nest& nest, const Mat& b, const Mat& c, double tol = 1e-6,
                                       int max_iter = 10000, bool gate = true);

// X in Alg N with X u_i = v_i, through the reversed nest and adjoints.
NestSolveResult nest_vector_solve(const Nest& nest, const std::vector<Vec>& u, const std::vector<Vec>& v,
                                  double tol = 1e-6, int max_iter = 10000);

struct TruncatedSolveResult {
    SolveStatus status = SolveStatus::Undecided;
    bool exact = false;  // nilpotent Fock space: truncated norm is the true norm
    HardyElement x;
    double norm = 0.0, residual = 0.0;
    int iterations = 0;
    bool gap_monotone = true;
};

// Alternating projections over coefficient space with B_i X(eta_i^*) = C_i and
// ||X||_truncated <= 1. Throws Infeasible when the certificate fails.
TruncatedSolveResult truncated_feasibility_solve(const PickProblem& p, const FockPtr& fock, double tol = 1e-6,
                                                 int max_iter = 10000);

// G = P_b - P_a for nest elements a < b (indices into 0..size).
struct Interval {
    int a = 0, b = 0;
};
Interval interval_of(const Nest& nest, const Mat& g, double tol = 1e-9);
Mat interval_projection(const Nest& nest, const Interval& iv);

double distance_to_ideal(const Nest& nest, const Mat& t, const std::vector<Interval>& intervals);
// max_j ||P_j^perp T P_j||, for arbitrary T.
double arveson_distance(const Nest& nest, const Mat& t);

// min ||Z|| over Z agreeing with `values` where fixed != 0, as a semidefinite
// program solved by a barrier method; accurate to about tol.
double min_norm_completion(const Mat& values, const Eigen::MatrixXi& fixed, double tol = 1e-9);
double ideal_distance_oracle(const Nest& nest, const Mat& t, const std::vector<Interval>& intervals,
                             double tol = 1e-9);
double arveson_distance_oracle(const Nest& nest, const Mat& t, double tol = 1e-9);

}  // namespace hardy

#endif
