#ifndef HARDY_FOCK_HPP
#define HARDY_FOCK_HPP

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "hardy/corr.hpp"

namespace hardy {

// M + E + E^2 + ... + E^N. Grades are stored up to N + 1 so that nilpotency
// and one step of overflow are visible; when some grade vanishes N is clipped
// to the last non-zero grade. Grade 0 is the identity correspondence (matrix
// unit coordinates), grade n >= 2 is the quotient of E kron E^{n-1}.
class TruncatedFock {
public:
    TruncatedFock(const Correspondence& e, int truncation);

    const Correspondence& correspondence() const { return grades_.at(1); }
    const MultiMatrixAlgebra& base() const { return grades_[0].base(); }
    int truncation() const { return n_; }
    int requested() const { return requested_; }
    bool nilpotent() const { return nilpotent_; }
    int max_grade() const { return static_cast<int>(grades_.size()) - 1; }

    const Correspondence& grade(int n) const { return grades_.at(n); }
    int grade_dim(int n) const { return n <= max_grade() ? grades_[n].dim() : 0; }
    int dim() const { return offsets_.back(); }
    int offset(int n) const { return offsets_.at(n); }

    // E kron E^{n-1} -> E^n in raw coordinates i * d_{n-1} + j, and a right inverse.
    const Mat& tensor_quotient(int n) const { return quotients_.at(n); }
    const Mat& tensor_lift(int n) const { return lifts_.at(n); }

    // A_{k,l}: E^k kron E^l -> E^{k+l}; zero when k + l exceeds max_grade().
    const Mat& rebracket(int k, int l) const;

    // T_xi for xi in E^k; overflow beyond grade N is dropped.
    Mat creation(int k, const Vec& xi) const;
    Mat left(const Mat& a) const;
    Mat grade_projection(int n) const;
    Mat gauge(double t) const;  // sum_n e^{int} P_n

private:
    int requested_ = 0, n_ = 0;
    bool nilpotent_ = false;
    std::vector<Correspondence> grades_;
    std::vector<int> offsets_;
    std::vector<Mat> quotients_, lifts_;
    mutable std::recursive_mutex mutex_;
    mutable std::map<std::pair<int, int>, Mat> rebracket_;
};

using FockPtr = std::shared_ptr<const TruncatedFock>;
FockPtr fock_truncate(const Correspondence& e, int truncation);

// Phi_j(A) = sum_k P_{k+j} A P_k.
Mat fourier_coefficient(const TruncatedFock& f, const Mat& a, int j);
// sum_{|j| < k} (1 - |j| / k) Phi_j(A).
Mat cesaro(const TruncatedFock& f, const Mat& a, int k);

// Truncated H^infty(E) element: X = sum_n T_{X_n}, X_n in E^n, X_0 in M given
// by its matrix unit coordinates.
class HardyElement {
public:
    HardyElement() = default;
    HardyElement(FockPtr fock, std::vector<Vec> coefficients);
    static HardyElement constant(FockPtr fock, const Mat& a);
    static HardyElement monomial(FockPtr fock, int k, const Vec& xi);

    const TruncatedFock& fock() const { return *fock_; }
    const FockPtr& fock_ptr() const { return fock_; }
    const std::vector<Vec>& coefficients() const { return coeffs_; }
    const Vec& coefficient(int n) const { return coeffs_.at(n); }
    int degree() const;
    bool nilpotent_exact() const { return fock_->nilpotent(); }

    Mat op() const;
    HardyElement operator*(const HardyElement& o) const;
    HardyElement operator+(const HardyElement& o) const;
    HardyElement scaled(cplx s) const;

private:
    FockPtr fock_;
    std::vector<Vec> coeffs_;
};

struct HardyNorm {
    double value = 0.0;
    bool exact = false;  // otherwise a lower bound
};
HardyNorm hardy_norm(const HardyElement& x);

// F(E) kron_sigma H, graded: K_n = E^n kron_sigma H for n <= max_grade.
class InducedFock {
public:
    InducedFock(FockPtr fock, NormalRep sigma);

    const TruncatedFock& fock() const { return *fock_; }
    const FockPtr& fock_ptr() const { return fock_; }
    const NormalRep& sigma() const { return sigma_; }
    int truncation() const { return fock_->truncation(); }
    int max_grade() const { return fock_->max_grade(); }
    const InteriorTensor& grade(int n) const { return grades_.at(n); }
    int grade_dim(int n) const { return n <= max_grade() ? grades_[n].dim() : 0; }
    int dim() const { return offsets_.back(); }
    int offset(int n) const { return offsets_.at(n); }

    // a kron h -> sigma(a) h, unitary K_0 -> H.
    const Mat& unit0() const { return unit0_; }

    // X kron I_H for an operator X on the truncated Fock space.
    Mat induce(const Mat& x) const;
    // E^k kron K_l -> K_{k+l} and a right inverse.
    const Mat& join(int k, int l) const;
    const Mat& split(int k, int l) const;
    // I_{E^k} kron Y as a map K_{k+a} -> K_{k+b}, for Y: K_a -> K_b.
    Mat inflate(int k, const Mat& y, int a, int b) const;

    // Psi(eta) = sum_n I_{E^n} kron eta and pi(b) = I kron b, b in sigma(M)'.
    Mat psi(const Mat& eta) const;
    Mat pi(const Mat& b) const;
    Mat grade_projection(int n) const;

private:
    FockPtr fock_;
    NormalRep sigma_;
    std::vector<InteriorTensor> grades_;
    std::vector<int> offsets_;
    Mat unit0_;
    mutable std::recursive_mutex mutex_;
    mutable std::map<std::pair<int, int>, Mat> join_, split_;
};

using InducedPtr = std::shared_ptr<const InducedFock>;

// sigma^{F(E)}, the sigma-dual, the dual Fock space induced by iota and the
// unitary U: F(E^sigma) kron_iota H -> F(E) kron_sigma H, one block per grade.
struct CommutantSetup {
    std::shared_ptr<const DualCorrespondence> dual;
    InducedPtr induced, dual_induced;
    std::vector<Mat> u;
    double u_unitarity = 0.0;    // max_n of ||U_n^* U_n - I|| and ||U_n U_n^* - I||
    double u_intertwining = 0.0; // max over the dual basis of ||U (T_eta kron I) U^* - Psi(eta)||

    Mat unitary() const { return block_diag(u); }
};

CommutantSetup induced_and_commutant(const NormalRep& sigma, const FockPtr& fock);

struct CommutantReport {
    double generator_residual = 0.0;  // commutators on valid grades
    int checked_pairs = 0;
    bool span_checked = false;        // only for nilpotent Fock spaces
    int dim_algebra = 0, dim_commutant = 0, dim_double_commutant = 0, dim_rho_span = 0;
    double containment_residual = 0.0;
    bool double_commutant_equal = false;
    bool rho_span_equal = false;
    bool passed(double tol) const;
};

CommutantReport verify_commutant(const CommutantSetup& setup, double tol = 1e-10);

}  // namespace hardy

#endif
