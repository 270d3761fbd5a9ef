#ifndef HARDY_TYPES_HPP
#define HARDY_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hardy {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

enum class ErrorKind {
    InvalidSpec,
    NotHermitian,
    NotFaithful,
    NotCompletelyPositive,
    DimensionMismatch,
    BoundaryUndefined,
    Infeasible,
    Singular,
    OutOfRange,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace hardy

#endif
