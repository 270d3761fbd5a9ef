#ifndef HARDY_DILATE_HPP
#define HARDY_DILATE_HPP

#include <memory>
#include <vector>

#include "hardy/eval.hpp"

namespace hardy {

struct Defects {
    Mat delta;       // (I - T~^* T~)^{1/2} on E kron_sigma H
    Mat delta_star;  // (I - T~ T~^*)^{1/2} on H
    Mat d_basis;     // orthonormal basis of the range of delta
    double commutation_residual = 0.0;  // delta against (sigma^E o phi)(M)
};

Defects defect_operators(const CovariantRep& rep, double tol = 1e-9);

// K = H + G_0 + ... + G_N with G_0 = D and G_n = E^n kron_{sigma_1} D.
// Vtilde acts on E kron_rho K in interior-tensor coordinates.
inline constexpr int kPowerRouteMaxDim = 64;

struct Dilation {
    int truncation = 0;
    int h = 0;
    Mat ttilde;
    std::vector<int> block_dims;     // H, G_0, ..., G_N
    std::vector<int> block_offsets;
    Defects defects;
    NormalRep rho;
    InteriorTensor ek;               // E kron_rho K
    // F(E) kron_rho K to depth 2 and the representation of Vtilde on it; only
    // built when dim K <= kPowerRouteMaxDim (null otherwise).
    InducedPtr induced;
    std::shared_ptr<const CovariantRep> v;
    Mat vtilde;

    double isometry_residual = 0.0;     // on E kron G_n for n < N
    double compression_residual = 0.0;  // P_H Vtilde on E kron H against T~
    double dilation_residual = 0.0;     // P_H V(xi_1)...V(xi_n) P_H against T(xi_1)...T(xi_n)
    double power_route_gap = 0.0;       // both factorization orders of Vtilde_2
    bool power_route_checked = false;
    double balance_residual = 0.0;
    bool coisometric = false;           // T~ T~^* = I
    double coisometry_residual = 0.0;   // ||Vtilde Vtilde^* - I||, when coisometric

    int dim() const { return block_offsets.back(); }
    Mat column_projection(int m) const;  // m = 1 is H, m >= 2 is G_{m-2}
};

Dilation minimal_isometric_dilation(const CovariantRep& rep, int n, double tol = 1e-9);

struct CncReport {
    Mat h1;  // orthonormal basis of the coisometric subspace up to degree N
    int degree = 0;
    bool exact = false;  // nilpotent E
    bool is_cnc = false;
    bool is_c0 = false;
    double theta_spectral_radius = 0.0;
    std::vector<double> decay;        // ||T~_k^*||, k = 0..degree
    double decay_route_gap = 0.0;     // ||T~_k^*||^2 against ||Theta^k(I)||
    double h1_isometry_residual = 0.0;  // | ||T~_n^* h|| - ||h|| | on the H_1 basis
};

CncReport cnc_classify(const CovariantRep& rep, int n, double tol = 1e-9);

struct WoldReport {
    int truncation = 0;
    double t_norm = 0.0;
    // column_norm[k][m-1] = || Vtilde_k Vtilde_k^* restricted to column m ||, k = 0..N
    std::vector<std::vector<double>> column_norm;
    double bound_violation = 0.0;   // max over m <= k of observed - (k+1)||T~||^{k-m+1}, when ||T~|| < 1
    bool monotone = true;           // P_{k+1} <= P_k
    double monotone_violation = 0.0;
    double p_infinity = 0.0;        // ||P_N|| on the columns m <= N / 2
    bool induced = false;           // p_infinity below the proof's bound (strict contractions only)
};

WoldReport wold_check(const Dilation& dil, double tol = 1e-9);

}  // namespace hardy

#endif
