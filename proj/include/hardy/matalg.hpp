#ifndef HARDY_MATALG_HPP
#define HARDY_MATALG_HPP

#include <functional>
#include <vector>

#include "hardy/linalg.hpp"

namespace hardy {

// Finite direct sum of full matrix blocks, realized as block-diagonal matrices
// of side sum(n_m). Coordinates list the matrix units block by block, each
// block column-stacked: e^{(m)}_{ij} has index base(m) + i + j * n_m.
class MultiMatrixAlgebra {
public:
    MultiMatrixAlgebra() = default;
    explicit MultiMatrixAlgebra(std::vector<int> block_sizes);

    const std::vector<int>& block_sizes() const { return sizes_; }
    int blocks() const { return static_cast<int>(sizes_.size()); }
    int block_size(int m) const { return sizes_.at(m); }
    int side() const { return side_; }
    int dim() const { return dim_; }
    int offset(int m) const { return offsets_.at(m); }
    int base(int m) const { return bases_.at(m); }

    int unit_index(int m, int i, int j) const { return bases_[m] + i + j * sizes_[m]; }
    struct Unit {
        int block, i, j;
    };
    Unit unit_at(int u) const;
    Mat unit(int m, int i, int j) const;
    Mat unit(int u) const;
    bool is_diagonal_unit(int u) const;

    Vec coords(const Mat& a) const;
    Mat element(const Vec& c) const;
    Mat identity() const { return Mat::Identity(side_, side_); }
    Vec identity_coords() const { return coords(identity()); }
    double off_block_norm(const Mat& a) const;

    // Matrices on coordinates of x -> a x and x -> x a.
    Mat left_multiplication(const Mat& a) const;
    Mat right_multiplication(const Mat& a) const;

    // Faithful trace: sum of the block traces.
    double trace_weight(int u) const { return is_diagonal_unit(u) ? 1.0 : 0.0; }

    bool operator==(const MultiMatrixAlgebra& o) const { return sizes_ == o.sizes_; }
    bool operator!=(const MultiMatrixAlgebra& o) const { return !(*this == o); }

private:
    std::vector<int> sizes_, offsets_, bases_;
    int side_ = 0, dim_ = 0;
};

MultiMatrixAlgebra make_multimatrix(const std::vector<int>& block_sizes);

// sigma(a) = V (sum_t a_t kron I_{m_t}) V^*, H ordered block by block with
// index i * m_t + s inside block t.
class NormalRep {
public:
    NormalRep() = default;
    NormalRep(MultiMatrixAlgebra source, std::vector<int> multiplicities);
    NormalRep(MultiMatrixAlgebra source, std::vector<int> multiplicities, Mat basis);

    // Recovers multiplicities and a canonical basis from the images of the
    // matrix units; checks the *-homomorphism relations.
    static NormalRep from_action(const MultiMatrixAlgebra& source, const std::vector<Mat>& unit_images,
                                 double tol = 1e-9);

    const MultiMatrixAlgebra& source() const { return source_; }
    const std::vector<int>& multiplicities() const { return mult_; }
    const Mat& basis() const { return basis_; }
    int dim() const { return dim_; }
    bool faithful() const;
    int block_offset(int t) const { return offsets_.at(t); }

    Mat operator()(const Mat& a) const;
    Mat apply_coords(const Vec& c) const;
    const Mat& unit(int u) const { return units_.at(u); }
    const std::vector<Mat>& units() const { return units_; }

private:
    void build();

    MultiMatrixAlgebra source_;
    std::vector<int> mult_, offsets_;
    Mat basis_;
    int dim_ = 0;
    std::vector<Mat> units_;
};

// sigma(M)' organized as a multi-matrix algebra with block sizes m_t, together
// with its identity representation iota on H (multiplicities n_t).
struct Commutant {
    MultiMatrixAlgebra algebra;
    NormalRep rep;
    std::vector<Mat> basis;  // Hilbert-Schmidt orthonormal null-space basis
    double residual = 0.0;   // distance of the iota units from the computed null space

    Vec coords(const Mat& x) const;
    Mat element(const Vec& c) const { return rep.apply_coords(c); }
    double distance(const Mat& x) const;
};

Commutant commutant(const NormalRep& rep);

// Span of all operators commuting with the given family (no faithfulness needed).
std::vector<Mat> commutant_span(const std::vector<Mat>& generators, Eigen::Index dim);

struct LinearMapOnAlgebra {
    MultiMatrixAlgebra domain, codomain;
    Mat matrix;  // codomain.dim() x domain.dim()

    Mat apply(const Mat& a) const { return codomain.element(matrix * domain.coords(a)); }
    Vec apply_coords(const Vec& c) const { return matrix * c; }

    static LinearMapOnAlgebra from_function(const MultiMatrixAlgebra& dom, const MultiMatrixAlgebra& cod,
                                            const std::function<Mat(const Mat&)>& f);
    static LinearMapOnAlgebra identity(const MultiMatrixAlgebra& a);
};

LinearMapOnAlgebra operator*(const LinearMapOnAlgebra& f, const LinearMapOnAlgebra& g);
LinearMapOnAlgebra operator+(const LinearMapOnAlgebra& f, const LinearMapOnAlgebra& g);
LinearMapOnAlgebra operator-(const LinearMapOnAlgebra& f, const LinearMapOnAlgebra& g);
LinearMapOnAlgebra operator*(cplx s, const LinearMapOnAlgebra& f);

// Ad(B, C)(A) = B A C^* on full matrix algebras.
LinearMapOnAlgebra ad_map(const Mat& b, const Mat& c);

Mat choi_matrix(const LinearMapOnAlgebra& phi, int block);

struct CpCertificate {
    bool completely_positive = true;
    std::vector<double> block_lambda_min;
    int offending_block = -1;
};

CpCertificate is_completely_positive(const LinearMapOnAlgebra& phi, double tol = kPsdTol);

}  // namespace hardy

#endif
