#ifndef HARDY_EVAL_HPP
#define HARDY_EVAL_HPP

#include <map>
#include <memory>
#include <mutex>

#include "hardy/fock.hpp"

namespace hardy {

// (T, sigma) anchored at a dual point: Ttilde = eta^*: E kron_sigma H -> H.
class CovariantRep {
public:
    CovariantRep(InducedPtr induced, DualPoint eta);

    const InducedFock& induced() const { return *induced_; }
    const InducedPtr& induced_ptr() const { return induced_; }
    const NormalRep& sigma() const { return induced_->sigma(); }
    const DualPoint& point() const { return eta_; }
    const Mat& ttilde() const { return ttilde_; }
    double covariance_residual() const;

    // Ttilde_n: E^n kron_sigma H -> H, n <= max_grade of the induced space.
    const Mat& power(int n) const;
    // Ttilde_{n-1} (I_{E^{n-1}} kron Ttilde), the other factorization order.
    Mat power_alternate(int n) const;

private:
    InducedPtr induced_;
    DualPoint eta_;
    Mat ttilde_;
    mutable std::recursive_mutex mutex_;
    mutable std::map<int, Mat> powers_;
};

CovariantRep covariant_from_point(const DualPoint& eta, InducedPtr induced, double tol = 1e-12);
Mat generalized_power(const CovariantRep& rep, int n);

// X(eta^*) = sum_n Ttilde_n (X_n kron h). Throws BoundaryUndefined when
// ||eta|| >= 1 on a non-nilpotent Fock space.
Mat evaluate(const HardyElement& x, const CovariantRep& rep);
Mat evaluate(const HardyElement& x, const DualPoint& eta, const NormalRep& sigma);

// X(eta^*) = L_eta^* rho(X) iota_H on F(E^sigma) kron_iota H truncated at n_dual.
class CauchyTransform {
public:
    CauchyTransform(std::shared_ptr<const DualCorrespondence> dual, FockPtr fock, DualPoint eta, int n_dual);

    const InducedFock& dual_induced() const { return *dual_induced_; }
    const Mat& l_eta() const { return l_eta_; }
    const Mat& iota_h() const { return iota_h_; }
    // W(xi): H -> E^sigma kron_iota H.
    Mat w(const Vec& xi) const;
    Mat rho(const HardyElement& x) const;
    Mat evaluate(const HardyElement& x) const;
    // || L^* rho(X) - L^* rho(X) iota_H L^* || on grades below n_dual - deg X.
    double remark_residual(const HardyElement& x) const;

private:
    const std::vector<Mat>& rho_basis(int k) const;

    std::shared_ptr<const DualCorrespondence> dual_;
    FockPtr fock_;
    InducedPtr dual_induced_;
    DualPoint eta_;
    Mat mu_, l_eta_, iota_h_;
    std::vector<Mat> rho_gen_;
    mutable std::recursive_mutex mutex_;
    mutable std::map<int, std::vector<Mat>> rho_cache_;
};

Mat cauchy_evaluate(const HardyElement& x, const DualPoint& eta, const NormalRep& sigma, int n_dual);

}  // namespace hardy

#endif
