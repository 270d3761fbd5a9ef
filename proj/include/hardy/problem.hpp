#ifndef HARDY_PROBLEM_HPP
#define HARDY_PROBLEM_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardy/dilate.hpp"
#include "hardy/solve.hpp"

namespace hardy {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Input error carrying the JSON pointer of the offending field.
class SpecError : public Error {
public:
    SpecError(std::string pointer, const std::string& what)
        : Error(ErrorKind::InvalidSpec, pointer + ": " + what), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

struct Options {
    int truncation = 6;
    double psd_tol = kPsdTol;
    double solve_tol = 1e-6;
    int max_iter = 10000;
    std::vector<double> r_grid{0.5, 0.9, 0.99};
};

struct ProblemSpec {
    json source;  // the validated input, options included
    std::string kind;
    MultiMatrixAlgebra algebra;
    Correspondence corr;
    std::optional<Realization> realization;
    std::vector<int> nest_dims;
    Eigen::MatrixXi adjacency;
    NormalRep sigma;
    std::shared_ptr<const DualCorrespondence> dual;
    std::vector<DualPoint> points;
    std::vector<Mat> point_input;  // points as given
    std::string point_coordinates = "raw";
    std::vector<cplx> nodes;       // identity kind: eta_i = conj(z_i) I
    std::vector<Mat> b, c;
    std::vector<Vec> element;      // Hardy element coefficients per grade
    std::optional<Mat> t;          // distance target
    std::vector<Interval> intervals;
    Options options;

    int k() const { return static_cast<int>(points.size()); }
    bool nest_operator_form() const { return kind == "nest" && points.empty(); }
    PickProblem pick_problem() const;
};

ProblemSpec parse_problem(const std::string& path);
ProblemSpec parse_problem(const json& j);

// Complex numbers as [re, im]; matrices as row-major arrays of those.
json to_json(cplx z);
json to_json(const Mat& m);
json to_json(const Vec& v);
cplx complex_from_json(const json& j, const std::string& pointer);
Mat matrix_from_json(const json& j, const std::string& pointer);
Vec vector_from_json(const json& j, const std::string& pointer);

struct Report {
    std::string command;
    std::string status = "pass";  // pass | fail | undecided | error
    json data = json::object();
    std::string text;

    json to_json() const;
    int exit_code() const;
};

int exit_code_for(const std::string& status);

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"check", "solve", "eval", "dual", "dilate", "distance", "verify", "sweep"};
    return c;
}

Report run(const std::string& command, const ProblemSpec& spec);

}  // namespace hardy

#endif
