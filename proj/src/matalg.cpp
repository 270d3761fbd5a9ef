#include "hardy/matalg.hpp"

#include <cmath>
#include <numeric>

namespace hardy {

MultiMatrixAlgebra::MultiMatrixAlgebra(std::vector<int> block_sizes) : sizes_(std::move(block_sizes)) {
    if (sizes_.empty()) throw Error(ErrorKind::InvalidSpec, "multi-matrix algebra needs at least one block");
    for (int n : sizes_) {
        if (n < 1) throw Error(ErrorKind::InvalidSpec, "block sizes must be positive");
        offsets_.push_back(side_);
        bases_.push_back(dim_);
        side_ += n;
        dim_ += n * n;
    }
}

MultiMatrixAlgebra make_multimatrix(const std::vector<int>& block_sizes) {
    return MultiMatrixAlgebra(block_sizes);
}

MultiMatrixAlgebra::Unit MultiMatrixAlgebra::unit_at(int u) const {
    if (u < 0 || u >= dim_) throw Error(ErrorKind::OutOfRange, "matrix unit index out of range");
    int m = blocks() - 1;
    while (bases_[m] > u) --m;
    int r = u - bases_[m];
    return {m, r % sizes_[m], r / sizes_[m]};
}

Mat MultiMatrixAlgebra::unit(int m, int i, int j) const {
    Mat e = Mat::Zero(side_, side_);
    e(offsets_.at(m) + i, offsets_.at(m) + j) = 1.0;
    return e;
}

Mat MultiMatrixAlgebra::unit(int u) const {
    Unit x = unit_at(u);
    return unit(x.block, x.i, x.j);
}

bool MultiMatrixAlgebra::is_diagonal_unit(int u) const {
    Unit x = unit_at(u);
    return x.i == x.j;
}

Vec MultiMatrixAlgebra::coords(const Mat& a) const {
    if (a.rows() != side_ || a.cols() != side_)
        throw Error(ErrorKind::DimensionMismatch, "algebra element has the wrong side");
    Vec c(dim_);
    for (int m = 0; m < blocks(); ++m) {
        const int n = sizes_[m], o = offsets_[m];
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) c(bases_[m] + i + j * n) = a(o + i, o + j);
    }
    return c;
}

Mat MultiMatrixAlgebra::element(const Vec& c) const {
    if (c.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "coordinate vector has the wrong length");
    Mat a = Mat::Zero(side_, side_);
    for (int m = 0; m < blocks(); ++m) {
        const int n = sizes_[m], o = offsets_[m];
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) a(o + i, o + j) = c(bases_[m] + i + j * n);
    }
    return a;
}

double MultiMatrixAlgebra::off_block_norm(const Mat& a) const {
    return (a - element(coords(a))).norm();
}

Mat MultiMatrixAlgebra::left_multiplication(const Mat& a) const {
    Mat out(dim_, dim_);
    for (int u = 0; u < dim_; ++u) out.col(u) = coords(a * unit(u));
    return out;
}

Mat MultiMatrixAlgebra::right_multiplication(const Mat& a) const {
    Mat out(dim_, dim_);
    for (int u = 0; u < dim_; ++u) out.col(u) = coords(unit(u) * a);
    return out;
}

NormalRep::NormalRep(MultiMatrixAlgebra source, std::vector<int> multiplicities)
    : source_(std::move(source)), mult_(std::move(multiplicities)) {
    build();
}

NormalRep::NormalRep(MultiMatrixAlgebra source, std::vector<int> multiplicities, Mat basis)
    : source_(std::move(source)), mult_(std::move(multiplicities)), basis_(std::move(basis)) {
    build();
}

void NormalRep::build() {
    if (static_cast<int>(mult_.size()) != source_.blocks())
        throw Error(ErrorKind::DimensionMismatch, "one multiplicity per block is required");
    offsets_.clear();
    dim_ = 0;
    for (int t = 0; t < source_.blocks(); ++t) {
        if (mult_[t] < 0) throw Error(ErrorKind::InvalidSpec, "multiplicities must be non-negative");
        offsets_.push_back(dim_);
        dim_ += mult_[t] * source_.block_size(t);
    }
    if (basis_.size() == 0) basis_ = Mat::Identity(dim_, dim_);
    if (basis_.rows() != dim_ || basis_.cols() != dim_)
        throw Error(ErrorKind::DimensionMismatch, "representation basis has the wrong size");
    units_.assign(source_.dim(), Mat());
    for (int u = 0; u < source_.dim(); ++u) {
        auto x = source_.unit_at(u);
        const int m = mult_[x.block], o = offsets_[x.block];
        Mat canon = Mat::Zero(dim_, dim_);
        for (int s = 0; s < m; ++s) canon(o + x.i * m + s, o + x.j * m + s) = 1.0;
        units_[u] = basis_ * canon * basis_.adjoint();
    }
}

bool NormalRep::faithful() const {
    for (int m : mult_)
        if (m < 1) return false;
    return true;
}

Mat NormalRep::operator()(const Mat& a) const {
    return apply_coords(source_.coords(a));
}

Mat NormalRep::apply_coords(const Vec& c) const {
    Mat out = Mat::Zero(dim_, dim_);
    for (int u = 0; u < source_.dim(); ++u)
        if (c(u) != cplx(0.0)) out += c(u) * units_[u];
    return out;
}

NormalRep NormalRep::from_action(const MultiMatrixAlgebra& source, const std::vector<Mat>& images, double tol) {
    if (static_cast<int>(images.size()) != source.dim())
        throw Error(ErrorKind::DimensionMismatch, "from_action: one image per matrix unit is required");
    const Eigen::Index h = images.empty() ? 0 : images[0].rows();
    Mat id = Mat::Zero(h, h);
    for (int u = 0; u < source.dim(); ++u) {
        auto x = source.unit_at(u);
        if ((images[u].adjoint() - images[source.unit_index(x.block, x.j, x.i)]).norm() > tol)
            throw Error(ErrorKind::InvalidSpec, "from_action: images are not *-preserving");
        if (x.i == x.j) id += images[u];
    }
    if ((id - Mat::Identity(h, h)).norm() > tol)
        throw Error(ErrorKind::InvalidSpec, "from_action: representation is not unital");
    std::vector<int> mult;
    Mat v = Mat::Zero(h, h);
    Eigen::Index off = 0;
    for (int t = 0; t < source.blocks(); ++t) {
        const int n = source.block_size(t);
        Mat w = range_basis(images[source.unit_index(t, 0, 0)], 1e-8);
        const int m = static_cast<int>(w.cols());
        mult.push_back(m);
        for (int i = 0; i < n; ++i) {
            Mat cols = images[source.unit_index(t, i, 0)] * w;
            for (int s = 0; s < m; ++s) v.col(off + i * m + s) = cols.col(s);
        }
        off += n * m;
    }
    if (off != h) throw Error(ErrorKind::InvalidSpec, "from_action: dimensions do not add up");
    if ((v.adjoint() * v - Mat::Identity(h, h)).norm() > 1e-8)
        throw Error(ErrorKind::InvalidSpec, "from_action: images do not form a *-representation");
    NormalRep rep(source, mult, v);
    double err = 0.0;
    for (int u = 0; u < source.dim(); ++u) err = std::max(err, (rep.unit(u) - images[u]).norm());
    if (err > tol) throw Error(ErrorKind::InvalidSpec, "from_action: images violate the matrix-unit relations");
    return rep;
}

namespace {

Mat commutation_system(const std::vector<Mat>& gens, Eigen::Index h) {
    Mat sys(static_cast<Eigen::Index>(gens.size()) * h * h, h * h);
    Mat id = Mat::Identity(h, h);
    for (size_t g = 0; g < gens.size(); ++g)
        sys.middleRows(static_cast<Eigen::Index>(g) * h * h, h * h) =
            kron(gens[g].transpose(), id) - kron(id, gens[g]);
    return sys;
}

}  // namespace

std::vector<Mat> commutant_span(const std::vector<Mat>& generators, Eigen::Index dim) {
    if (generators.empty()) {
        std::vector<Mat> all;
        for (Eigen::Index k = 0; k < dim * dim; ++k) all.push_back(unvec(Vec::Unit(dim * dim, k), dim, dim));
        return all;
    }
    Mat ns = null_space(commutation_system(generators, dim));
    std::vector<Mat> out;
    for (Eigen::Index k = 0; k < ns.cols(); ++k) out.push_back(unvec(ns.col(k), dim, dim));
    return out;
}

Commutant commutant(const NormalRep& rep) {
    const auto& src = rep.source();
    for (int t = 0; t < src.blocks(); ++t)
        if (rep.multiplicities()[t] < 1)
            throw Error(ErrorKind::NotFaithful,
                        "commutant: block " + std::to_string(t) + " has multiplicity zero");
    const Eigen::Index h = rep.dim();
    Mat ns = null_space(commutation_system(rep.units(), h));

    Commutant c;
    std::vector<int> sizes = rep.multiplicities(), mult = src.block_sizes();
    int expected = 0;
    for (int m : sizes) expected += m * m;
    if (ns.cols() != expected)
        throw Error(ErrorKind::Singular, "commutant: numerical null space has dimension " +
                                             std::to_string(ns.cols()) + ", expected " + std::to_string(expected));
    for (Eigen::Index k = 0; k < ns.cols(); ++k) c.basis.push_back(unvec(ns.col(k), h, h));

    // iota's canonical order is p * n_t + i where sigma's is i * m_t + p.
    Mat v(h, h);
    for (int t = 0; t < src.blocks(); ++t) {
        const int n = src.block_size(t), m = sizes[t], o = rep.block_offset(t);
        for (int p = 0; p < m; ++p)
            for (int i = 0; i < n; ++i) v.col(o + p * n + i) = rep.basis().col(o + i * m + p);
    }
    c.algebra = MultiMatrixAlgebra(sizes);
    c.rep = NormalRep(c.algebra, mult, v);
    for (const auto& u : c.rep.units()) {
        Vec x = vec(u);
        c.residual = std::max(c.residual, (x - ns * (ns.adjoint() * x)).norm());
    }
    return c;
}

Vec Commutant::coords(const Mat& x) const {
    Vec c(algebra.dim());
    for (int u = 0; u < algebra.dim(); ++u) {
        const int n = rep.multiplicities()[algebra.unit_at(u).block];
        c(u) = (rep.unit(u).adjoint() * x).trace() / static_cast<double>(n);
    }
    return c;
}

double Commutant::distance(const Mat& x) const {
    return (x - element(coords(x))).norm();
}

LinearMapOnAlgebra LinearMapOnAlgebra::from_function(const MultiMatrixAlgebra& dom, const MultiMatrixAlgebra& cod,
                                                     const std::function<Mat(const Mat&)>& f) {
    LinearMapOnAlgebra out{dom, cod, Mat(cod.dim(), dom.dim())};
    for (int u = 0; u < dom.dim(); ++u) {
        Mat y = f(dom.unit(u));
        double off = cod.off_block_norm(y);
        if (off > 1e-9 * (1.0 + y.norm()))
            throw Error(ErrorKind::DimensionMismatch, "linear map leaves its codomain algebra");
        out.matrix.col(u) = cod.coords(y);
    }
    return out;
}

LinearMapOnAlgebra LinearMapOnAlgebra::identity(const MultiMatrixAlgebra& a) {
    return {a, a, Mat::Identity(a.dim(), a.dim())};
}

LinearMapOnAlgebra operator*(const LinearMapOnAlgebra& f, const LinearMapOnAlgebra& g) {
    if (f.domain != g.codomain) throw Error(ErrorKind::DimensionMismatch, "composition of incompatible maps");
    return {g.domain, f.codomain, f.matrix * g.matrix};
}

LinearMapOnAlgebra operator+(const LinearMapOnAlgebra& f, const LinearMapOnAlgebra& g) {
    if (f.domain != g.domain || f.codomain != g.codomain)
        throw Error(ErrorKind::DimensionMismatch, "sum of incompatible maps");
    return {f.domain, f.codomain, f.matrix + g.matrix};
}

LinearMapOnAlgebra operator-(const LinearMapOnAlgebra& f, const LinearMapOnAlgebra& g) {
    return f + cplx(-1.0) * g;
}

LinearMapOnAlgebra operator*(cplx s, const LinearMapOnAlgebra& f) {
    return {f.domain, f.codomain, s * f.matrix};
}

LinearMapOnAlgebra ad_map(const Mat& b, const Mat& c) {
    if (b.rows() != c.rows() || b.cols() != c.cols())
        throw Error(ErrorKind::DimensionMismatch, "Ad(B, C) needs equally shaped B and C");
    MultiMatrixAlgebra dom({static_cast<int>(b.cols())}), cod({static_cast<int>(b.rows())});
    return {dom, cod, kron(c.conjugate(), b)};
}

Mat choi_matrix(const LinearMapOnAlgebra& phi, int block) {
    if (block < 0 || block >= phi.domain.blocks())
        throw Error(ErrorKind::OutOfRange, "choi_matrix: block index out of range");
    const int n = phi.domain.block_size(block), s = phi.codomain.side();
    Mat out(n * s, n * s);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.block(i * s, j * s, s, s) =
                phi.codomain.element(phi.matrix.col(phi.domain.unit_index(block, i, j)));
    return out;
}

CpCertificate is_completely_positive(const LinearMapOnAlgebra& phi, double tol) {
    double scale = 0.0, skew = 0.0;
    for (int u = 0; u < phi.domain.dim(); ++u) {
        auto x = phi.domain.unit_at(u);
        Mat a = phi.codomain.element(phi.matrix.col(u));
        Mat b = phi.codomain.element(phi.matrix.col(phi.domain.unit_index(x.block, x.j, x.i)));
        scale = std::max(scale, a.norm());
        skew = std::max(skew, (a.adjoint() - b).norm());
    }
    if (skew > tol * (1.0 + scale))
        throw Error(ErrorKind::NotHermitian, "is_completely_positive: map is not *-preserving");
    CpCertificate cert;
    for (int m = 0; m < phi.domain.blocks(); ++m) {
        PsdResult r = is_psd(choi_matrix(phi, m), tol);
        cert.block_lambda_min.push_back(r.lambda_min);
        if (!r.psd && cert.completely_positive) {
            cert.completely_positive = false;
            cert.offending_block = m;
        }
    }
    return cert;
}

}  // namespace hardy
