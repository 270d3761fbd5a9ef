#include "hardy/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "hardy/random.hpp"

namespace hardy {

namespace {

std::string at(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string at(const std::string& base, size_t i) { return base + "/" + std::to_string(i); }

void require_object(const json& j, const std::string& ptr) {
    if (!j.is_object()) throw SpecError(ptr, "expected an object");
}

void require_array(const json& j, const std::string& ptr) {
    if (!j.is_array()) throw SpecError(ptr, "expected an array");
}

void check_keys(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw SpecError(at(ptr, it.key()), "unknown field");
}

int int_from_json(const json& j, const std::string& ptr, int min_value) {
    if (!j.is_number_integer()) throw SpecError(ptr, "expected an integer");
    const int v = j.get<int>();
    if (v < min_value) throw SpecError(ptr, "must be at least " + std::to_string(min_value));
    return v;
}

double double_from_json(const json& j, const std::string& ptr) {
    if (!j.is_number()) throw SpecError(ptr, "expected a number");
    return j.get<double>();
}

std::vector<int> ints_from_json(const json& j, const std::string& ptr, int min_value) {
    require_array(j, ptr);
    std::vector<int> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(int_from_json(j[i], at(ptr, i), min_value));
    return out;
}

std::vector<Mat> matrices_from_json(const json& j, const std::string& ptr) {
    require_array(j, ptr);
    std::vector<Mat> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(matrix_from_json(j[i], at(ptr, i)));
    return out;
}

std::string shape(const Mat& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

std::string fmt(cplx z) {
    std::ostringstream os;
    os << std::setprecision(6) << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

std::string fmt(const Mat& m, const std::string& indent = "  ") {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << indent << "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << fmt(m(i, j));
        os << "]\n";
    }
    return os.str();
}

bool all_identity(const std::vector<Mat>& ms) {
    for (const auto& m : ms)
        if (m.rows() != m.cols() || (m - Mat::Identity(m.rows(), m.cols())).norm() > 1e-14) return false;
    return true;
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

cplx complex_from_json(const json& j, const std::string& ptr) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SpecError(ptr, "expected a complex number [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Mat matrix_from_json(const json& j, const std::string& ptr) {
    require_array(j, ptr);
    if (j.empty()) return Mat(0, 0);
    const size_t cols = j[0].is_array() ? j[0].size() : 0;
    Mat m(j.size(), cols);
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string row = at(ptr, i);
        require_array(j[i], row);
        if (j[i].size() != cols) throw SpecError(row, "rows of a matrix must have equal length");
        for (size_t c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c], at(row, c));
    }
    return m;
}

Vec vector_from_json(const json& j, const std::string& ptr) {
    require_array(j, ptr);
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i], at(ptr, i));
    return v;
}

PickProblem ProblemSpec::pick_problem() const {
    PickProblem p;
    p.dual = dual;
    p.points = points;
    p.b = b;
    p.c = c;
    p.psd_tol = options.psd_tol;
    return p;
}

ProblemSpec parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("", "cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SpecError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_problem(j);
}

ProblemSpec parse_problem(const json& root) {
    require_object(root, "");
    check_keys(root, "", {"version", "problem", "options"});
    if (!root.contains("version")) throw SpecError("/version", "missing mandatory field");
    if (int_from_json(root["version"], "/version", 0) != kFormatVersion)
        throw SpecError("/version", "unsupported version, expected " + std::to_string(kFormatVersion));
    if (!root.contains("problem")) throw SpecError("/problem", "missing mandatory field");
    const json& p = root["problem"];
    require_object(p, "/problem");
    check_keys(p, "/problem",
               {"algebra", "correspondence", "representation", "points", "point_coordinates", "nodes", "B", "C",
                "element", "T", "intervals"});

    ProblemSpec s;

    // Options first: several checks below depend on the truncation.
    json opts = root.value("options", json::object());
    require_object(opts, "/options");
    check_keys(opts, "/options", {"truncation", "psd_tol", "solve_tol", "max_iter", "r_grid"});
    if (opts.contains("truncation")) s.options.truncation = int_from_json(opts["truncation"], "/options/truncation", 0);
    if (opts.contains("psd_tol")) s.options.psd_tol = double_from_json(opts["psd_tol"], "/options/psd_tol");
    if (opts.contains("solve_tol")) s.options.solve_tol = double_from_json(opts["solve_tol"], "/options/solve_tol");
    if (opts.contains("max_iter")) s.options.max_iter = int_from_json(opts["max_iter"], "/options/max_iter", 1);
    if (opts.contains("r_grid")) {
        require_array(opts["r_grid"], "/options/r_grid");
        s.options.r_grid.clear();
        for (size_t i = 0; i < opts["r_grid"].size(); ++i) {
            const double r = double_from_json(opts["r_grid"][i], at("/options/r_grid", i));
            if (r < 0.0 || r >= 1.0) throw SpecError(at("/options/r_grid", i), "grid values must lie in [0, 1)");
            s.options.r_grid.push_back(r);
        }
    }
    if (s.options.psd_tol <= 0.0) throw SpecError("/options/psd_tol", "must be positive");
    if (s.options.solve_tol <= 0.0) throw SpecError("/options/solve_tol", "must be positive");

    // Correspondence.
    if (!p.contains("correspondence")) throw SpecError("/problem/correspondence", "missing mandatory field");
    const json& cj = p["correspondence"];
    const std::string cptr = "/problem/correspondence";
    require_object(cj, cptr);
    if (!cj.contains("kind") || !cj["kind"].is_string()) throw SpecError(at(cptr, "kind"), "missing or not a string");
    s.kind = cj["kind"].get<std::string>();

    std::optional<std::vector<int>> algebra;
    if (p.contains("algebra")) algebra = ints_from_json(p["algebra"], "/problem/algebra", 1);
    auto need_algebra = [&]() {
        if (!algebra || algebra->empty()) throw SpecError("/problem/algebra", "required for kind '" + s.kind + "'");
        return MultiMatrixAlgebra(*algebra);
    };
    auto match_algebra = [&](const MultiMatrixAlgebra& derived) {
        if (algebra && *algebra != derived.block_sizes())
            throw SpecError("/problem/algebra", "does not match the algebra implied by " + cptr);
        return derived;
    };

    try {
        if (s.kind == "quiver") {
            check_keys(cj, cptr, {"kind", "adjacency"});
            if (!cj.contains("adjacency")) throw SpecError(at(cptr, "adjacency"), "missing");
            const json& a = cj["adjacency"];
            require_array(a, at(cptr, "adjacency"));
            const int n = static_cast<int>(a.size());
            if (n == 0) throw SpecError(at(cptr, "adjacency"), "empty adjacency matrix");
            s.adjacency.resize(n, n);
            for (int i = 0; i < n; ++i) {
                auto row = ints_from_json(a[i], at(at(cptr, "adjacency"), i), 0);
                if (static_cast<int>(row.size()) != n)
                    throw SpecError(at(at(cptr, "adjacency"), i), "adjacency matrix must be square");
                for (int j = 0; j < n; ++j) s.adjacency(i, j) = row[j];
            }
            s.corr = correspondence_from_quiver(s.adjacency);
            s.algebra = match_algebra(s.corr.base());
        } else if (s.kind == "nest") {
            check_keys(cj, cptr, {"kind", "dims"});
            if (!cj.contains("dims")) throw SpecError(at(cptr, "dims"), "missing");
            s.nest_dims = ints_from_json(cj["dims"], at(cptr, "dims"), 1);
            if (s.nest_dims.size() < 2) throw SpecError(at(cptr, "dims"), "a nest needs at least two blocks");
            auto nc = correspondence_from_nest(s.nest_dims);
            s.corr = nc.corr;
            s.realization = nc.realization;
            s.algebra = match_algebra(s.corr.base());
        } else if (s.kind == "cp_map") {
            check_keys(cj, cptr, {"kind", "kraus"});
            s.algebra = need_algebra();
            if (!cj.contains("kraus")) throw SpecError(at(cptr, "kraus"), "missing");
            auto kraus = matrices_from_json(cj["kraus"], at(cptr, "kraus"));
            if (kraus.empty()) throw SpecError(at(cptr, "kraus"), "at least one Kraus operator is needed");
            for (size_t i = 0; i < kraus.size(); ++i)
                if (kraus[i].rows() != s.algebra.side() || kraus[i].cols() != s.algebra.side())
                    throw SpecError(at(at(cptr, "kraus"), i), "is " + shape(kraus[i]) + " but /problem/algebra has side " +
                                                                   std::to_string(s.algebra.side()));
            auto f = [&](const Mat& a) {
                Mat out = Mat::Zero(a.rows(), a.cols());
                for (const auto& k : kraus) out += k * a * k.adjoint();
                return out;
            };
            for (int u = 0; u < s.algebra.dim(); ++u)
                if (s.algebra.off_block_norm(f(s.algebra.unit(u))) > 1e-10)
                    throw SpecError(at(cptr, "kraus"), "the map does not preserve /problem/algebra");
            s.corr = correspondence_from_cp_map(s.algebra, LinearMapOnAlgebra::from_function(s.algebra, s.algebra, f));
        } else if (s.kind == "explicit") {
            check_keys(cj, cptr, {"kind", "operators", "left_units"});
            s.algebra = need_algebra();
            if (!cj.contains("operators")) throw SpecError(at(cptr, "operators"), "missing");
            if (!cj.contains("left_units")) throw SpecError(at(cptr, "left_units"), "missing");
            auto ops = matrices_from_json(cj["operators"], at(cptr, "operators"));
            auto psi = matrices_from_json(cj["left_units"], at(cptr, "left_units"));
            if (static_cast<int>(psi.size()) != s.algebra.dim())
                throw SpecError(at(cptr, "left_units"), "needs one matrix per unit of /problem/algebra (" +
                                                            std::to_string(s.algebra.dim()) + ")");
            auto rc = correspondence_from_operators(s.algebra, ops, psi);
            s.corr = rc.corr;
            s.realization = rc.realization;
        } else if (s.kind == "column") {
            check_keys(cj, cptr, {"kind", "n"});
            s.algebra = need_algebra();
            if (s.algebra.blocks() != 1) throw SpecError("/problem/algebra", "kind 'column' needs a single block");
            if (!cj.contains("n")) throw SpecError(at(cptr, "n"), "missing");
            auto rc = column_space_correspondence(s.algebra.side(), int_from_json(cj["n"], at(cptr, "n"), 1));
            s.corr = rc.corr;
            s.realization = rc.realization;
        } else if (s.kind == "identity") {
            check_keys(cj, cptr, {"kind"});
            s.algebra = need_algebra();
            s.corr = identity_correspondence(s.algebra);
            s.realization = identity_realization(s.algebra);
        } else {
            throw SpecError(at(cptr, "kind"), "unknown kind '" + s.kind + "'");
        }
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        throw SpecError(cptr, e.what());
    }

    // Representation and dual.
    std::vector<int> mult(s.algebra.blocks(), 1);
    if (p.contains("representation")) {
        mult = ints_from_json(p["representation"], "/problem/representation", 0);
        if (static_cast<int>(mult.size()) != s.algebra.blocks())
            throw SpecError("/problem/representation", "needs one multiplicity per block of /problem/algebra (" +
                                                           std::to_string(s.algebra.blocks()) + ")");
    }
    try {
        s.sigma = NormalRep(s.algebra, mult);
        if (!s.sigma.faithful()) throw SpecError("/problem/representation", "representation must be faithful");
        s.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(s.corr, s.sigma));
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        throw SpecError("/problem/representation", e.what());
    }
    const int h = s.sigma.dim();
    const int de = s.corr.dim();

    // Points.
    if (p.contains("nodes") && p.contains("points"))
        throw SpecError("/problem/nodes", "give either /problem/nodes or /problem/points");
    if (p.contains("point_coordinates")) {
        if (!p["point_coordinates"].is_string()) throw SpecError("/problem/point_coordinates", "expected a string");
        s.point_coordinates = p["point_coordinates"].get<std::string>();
        if (s.point_coordinates != "raw" && s.point_coordinates != "quotient" && s.point_coordinates != "realization")
            throw SpecError("/problem/point_coordinates", "expected raw, quotient or realization");
    }
    if (p.contains("nodes")) {
        if (s.kind != "identity") throw SpecError("/problem/nodes", "nodes are only defined for kind 'identity'");
        if (mult != std::vector<int>(s.algebra.blocks(), 1))
            throw SpecError("/problem/nodes", "nodes need the identity representation (all multiplicities 1)");
        require_array(p["nodes"], "/problem/nodes");
        for (size_t i = 0; i < p["nodes"].size(); ++i) {
            const cplx z = complex_from_json(p["nodes"][i], at("/problem/nodes", i));
            if (std::abs(z) >= 1.0) throw SpecError(at("/problem/nodes", i), "node must lie in the open disc");
            s.nodes.push_back(z);
            s.points.push_back(point_from_realization(*s.dual, *s.realization, std::conj(z) * Mat::Identity(h, h)));
        }
    }
    if (p.contains("points")) {
        s.point_input = matrices_from_json(p["points"], "/problem/points");
        for (size_t i = 0; i < s.point_input.size(); ++i) {
            const std::string ptr = at("/problem/points", i);
            const Mat& m = s.point_input[i];
            try {
                if (s.point_coordinates == "raw") {
                    if (m.rows() != de * h || m.cols() != h)
                        throw SpecError(ptr, "is " + shape(m) + " but raw coordinates need (dim E * dim H) x dim H = " +
                                                 std::to_string(de * h) + "x" + std::to_string(h));
                    s.points.push_back(point_from_raw(*s.dual, m));
                } else if (s.point_coordinates == "quotient") {
                    if (m.rows() != s.dual->eh.dim() || m.cols() != h)
                        throw SpecError(ptr, "is " + shape(m) + " but quotient coordinates need " +
                                                 std::to_string(s.dual->eh.dim()) + "x" + std::to_string(h));
                    s.points.push_back(make_point(*s.dual, m));
                } else {
                    if (!s.realization)
                        throw SpecError("/problem/point_coordinates", "kind '" + s.kind + "' has no realization");
                    if (mult != std::vector<int>(s.algebra.blocks(), 1))
                        throw SpecError(ptr, "realization coordinates need the identity representation");
                    s.points.push_back(point_from_realization(*s.dual, *s.realization, m));
                }
            } catch (const SpecError&) {
                throw;
            } catch (const Error& e) {
                throw SpecError(ptr, e.what());
            }
        }
    }

    // B and C.
    if (p.contains("B")) s.b = matrices_from_json(p["B"], "/problem/B");
    if (p.contains("C")) s.c = matrices_from_json(p["C"], "/problem/C");
    if (s.nest_operator_form() && (p.contains("B") || p.contains("C"))) {
        if (s.b.size() != 1 || s.c.size() != 1)
            throw SpecError(s.b.size() != 1 ? "/problem/B" : "/problem/C",
                            "the nest operator form takes exactly one B and one C");
        const int d = s.algebra.side();
        if (s.b[0].cols() != d)
            throw SpecError("/problem/B/0", "has " + std::to_string(s.b[0].cols()) + " columns but the nest side is " +
                                                std::to_string(d));
        if (s.c[0].rows() != s.b[0].rows() || s.c[0].cols() != d)
            throw SpecError("/problem/C/0", "is " + shape(s.c[0]) + " but /problem/B/0 is " + shape(s.b[0]) +
                                                " (C must be r x " + std::to_string(d) + ")");
    } else if (!s.points.empty()) {
        if (!p.contains("B")) s.b.assign(s.points.size(), Mat::Identity(h, h));
        if (s.b.size() != s.points.size())
            throw SpecError("/problem/B", "has " + std::to_string(s.b.size()) + " entries but there are " +
                                              std::to_string(s.points.size()) + " points");
        if (p.contains("C") && s.c.size() != s.points.size())
            throw SpecError("/problem/C", "has " + std::to_string(s.c.size()) + " entries but there are " +
                                              std::to_string(s.points.size()) + " points");
        for (size_t i = 0; i < s.b.size(); ++i)
            if (s.b[i].rows() != h || s.b[i].cols() != h)
                throw SpecError(at("/problem/B", i), "is " + shape(s.b[i]) + " but /problem/representation gives dim H = " +
                                                         std::to_string(h));
        for (size_t i = 0; i < s.c.size(); ++i)
            if (s.c[i].rows() != h || s.c[i].cols() != h)
                throw SpecError(at("/problem/C", i), "is " + shape(s.c[i]) + " but /problem/representation gives dim H = " +
                                                         std::to_string(h));
    }

    if (p.contains("element")) {
        require_array(p["element"], "/problem/element");
        for (size_t g = 0; g < p["element"].size(); ++g) s.element.push_back(vector_from_json(p["element"][g], at("/problem/element", g)));
    }

    if (p.contains("T")) {
        if (s.kind != "nest") throw SpecError("/problem/T", "distances are defined for kind 'nest'");
        s.t = matrix_from_json(p["T"], "/problem/T");
        if (s.t->rows() != s.algebra.side() || s.t->cols() != s.algebra.side())
            throw SpecError("/problem/T", "is " + shape(*s.t) + " but the nest side is " + std::to_string(s.algebra.side()));
    }
    if (p.contains("intervals")) {
        require_array(p["intervals"], "/problem/intervals");
        const int n = static_cast<int>(s.nest_dims.size());
        for (size_t i = 0; i < p["intervals"].size(); ++i) {
            auto ab = ints_from_json(p["intervals"][i], at("/problem/intervals", i), 0);
            if (ab.size() != 2 || ab[0] >= ab[1] || ab[1] > n)
                throw SpecError(at("/problem/intervals", i), "expected [a, b] with 0 <= a < b <= " + std::to_string(n));
            s.intervals.push_back({ab[0], ab[1]});
        }
    }

    s.source = root;
    s.source["options"] = {{"truncation", s.options.truncation},
                           {"psd_tol", s.options.psd_tol},
                           {"solve_tol", s.options.solve_tol},
                           {"max_iter", s.options.max_iter},
                           {"r_grid", s.options.r_grid}};
    return s;
}

int exit_code_for(const std::string& status) {
    if (status == "pass") return 0;
    if (status == "fail") return 1;
    if (status == "undecided") return 2;
    return 3;
}

int Report::exit_code() const { return exit_code_for(status); }

json Report::to_json() const {
    return {{"version", kFormatVersion}, {"command", command}, {"status", status}, {"exit_code", exit_code()}, {"result", data}};
}

namespace {

json certificate_json(const Certificate& c) {
    json blocks = json::array();
    for (const auto& b : c.blocks) blocks.push_back(hardy::to_json(b));
    return {{"feasible", c.feasible},
            {"lambda_min", c.lambda_min},
            {"block_lambda_min", c.block_lambda_min},
            {"theta_residual", c.theta_residual},
            {"series_residual", c.series_residual},
            {"blocks", blocks}};
}

std::string certificate_text(const std::string& name, const Certificate& c, bool print_blocks) {
    std::ostringstream os;
    os << name << ": " << (c.feasible ? "feasible" : "infeasible") << ", lambda_min = " << fmt(c.lambda_min) << "\n";
    if (print_blocks)
        for (size_t i = 0; i < c.blocks.size(); ++i) {
            os << "  block " << i << " (det " << fmt(c.blocks[i].determinant()) << "):\n" << fmt(c.blocks[i], "    ");
        }
    return os.str();
}

Nest spec_nest(const ProblemSpec& s) { return nest_from_dims(s.nest_dims); }

bool nilpotent(const ProblemSpec& s) { return fock_truncate(s.corr, s.options.truncation)->nilpotent(); }

void require_points(const ProblemSpec& s, bool need_c) {
    if (s.points.empty()) throw SpecError("/problem/points", "this command needs at least one point");
    if (need_c && s.c.empty()) throw SpecError("/problem/C", "this command needs target values C");
}

// Direct matrix for the recognized special families; nullopt otherwise.
std::optional<std::pair<std::string, Certificate>> specialization(const ProblemSpec& s) {
    const double tol = s.options.psd_tol;
    const bool ident_rep = s.sigma.multiplicities() == std::vector<int>(s.algebra.blocks(), 1);
    if (s.kind == "identity" && !s.nodes.empty() && s.algebra.blocks() == 1) {
        if (s.algebra.side() == 1 && all_identity(s.b)) {
            std::vector<cplx> w;
            for (const auto& c : s.c) w.push_back(c(0, 0));
            return std::make_pair(std::string("scalar"), scalar_pick(s.nodes, w, tol));
        }
        return std::make_pair(std::string("matrix"), matrix_pick(s.nodes, s.b, s.c, tol));
    }
    if (s.kind == "column" && s.point_coordinates == "realization" && ident_rep && all_identity(s.b)) {
        const int h = s.algebra.side();
        std::vector<Vec> v;
        for (const auto& m : s.point_input) {
            Vec x(m.rows() / h);
            for (Eigen::Index l = 0; l < x.size(); ++l) x(l) = m(l * h, 0);
            if ((kron(Mat(x), Mat::Identity(h, h)) - m).norm() > 1e-12) return std::nullopt;
            v.push_back(x);
        }
        return std::make_pair(std::string("ball"), ball_pick(v, s.c, tol));
    }
    if (s.kind == "quiver" && s.point_coordinates == "raw" && ident_rep && all_identity(s.b)) {
        auto edges = quiver_edges(s.adjacency);
        const int n = static_cast<int>(s.adjacency.rows());
        std::vector<Vec> y;
        for (const auto& m : s.point_input) {
            Vec ye(edges.size());
            for (size_t e = 0; e < edges.size(); ++e) ye(e) = m(e * n + edges[e].j, edges[e].i);
            if ((quiver_point_raw(s.adjacency, ye) - m).norm() > 1e-12) return std::nullopt;
            y.push_back(ye);
        }
        return std::make_pair(std::string("quiver"), quiver_pick(s.adjacency, y, s.c, tol));
    }
    return std::nullopt;
}

HardyElement spec_element(const ProblemSpec& s, const FockPtr& fock) {
    if (s.element.empty()) throw SpecError("/problem/element", "this command needs a Hardy element");
    if (static_cast<int>(s.element.size()) > fock->truncation() + 1)
        throw SpecError("/problem/element", "has " + std::to_string(s.element.size()) + " grades but the truncation allows " +
                                                std::to_string(fock->truncation() + 1));
    for (size_t g = 0; g < s.element.size(); ++g)
        if (s.element[g].size() != fock->grade_dim(static_cast<int>(g)))
            throw SpecError(at("/problem/element", g), "has length " + std::to_string(s.element[g].size()) +
                                                           " but grade " + std::to_string(g) + " has dimension " +
                                                           std::to_string(fock->grade_dim(static_cast<int>(g))));
    std::vector<Vec> coeffs = s.element;
    for (int g = static_cast<int>(coeffs.size()); g <= fock->truncation(); ++g) coeffs.push_back(Vec::Zero(fock->grade_dim(g)));
    return HardyElement(fock, coeffs);
}

Report run_check(const ProblemSpec& s) {
    Report r;
    if (s.nest_operator_form()) {
        if (s.b.empty()) throw SpecError("/problem/B", "the nest operator form needs B and C");
        Certificate c = nest_pick_condition(spec_nest(s), s.b[0], s.c[0], s.options.psd_tol);
        r.data["certificate"] = certificate_json(c);
        r.data["form"] = "nest";
        r.text = certificate_text("nest certificate", c, true);
        r.status = c.feasible ? "pass" : "fail";
        return r;
    }
    require_points(s, true);
    Certificate g = pick_condition(s.pick_problem(), nilpotent(s));
    r.data["certificate"] = certificate_json(g);
    r.text = certificate_text("generic certificate", g, true);
    if (auto sp = specialization(s)) {
        const auto& [name, c] = *sp;
        const double gap = std::abs(c.lambda_min - g.lambda_min);
        r.data["specialization"] = {{"family", name},
                                    {"certificate", certificate_json(c)},
                                    {"flags_agree", c.feasible == g.feasible},
                                    {"lambda_gap", gap}};
        r.text += certificate_text(name + " certificate", c, false);
        r.text += std::string("agreement: flags ") + (c.feasible == g.feasible ? "agree" : "DISAGREE") +
                  ", lambda_min gap " + fmt(gap) + "\n";
    }
    r.status = g.feasible ? "pass" : "fail";
    return r;
}

Report run_solve(const ProblemSpec& s) {
    Report r;
    const auto& o = s.options;
    if (s.nest_operator_form()) {
        if (s.b.empty()) throw SpecError("/problem/B", "the nest operator form needs B and C");
        NestSolveResult res = nest_feasibility_solve(spec_nest(s), s.b[0], s.c[0], o.solve_tol, o.max_iter);
        r.data = {{"solver", "nest"},
                  {"outcome", to_string(res.status)},
                  {"certificate", certificate_json(res.certificate)},
                  {"iterations", res.iterations},
                  {"gap_monotone", res.gap_monotone}};
        r.text = std::string("nest solve: ") + to_string(res.status) + "\n";
        if (res.status == SolveStatus::Solved) {
            r.data["X"] = to_json(res.x);
            r.data["norm"] = res.norm;
            r.data["residual"] = res.residual;
            r.text += "X =\n" + fmt(res.x) + "||X|| = " + fmt(res.norm) + ", ||BX - C|| = " + fmt(res.residual) + "\n";
        } else {
            r.text += certificate_text("certificate", res.certificate, false);
        }
        r.status = res.status == SolveStatus::Solved ? "pass" : res.status == SolveStatus::Infeasible ? "fail" : "undecided";
        return r;
    }
    require_points(s, true);
    if (s.kind == "identity" && s.algebra.side() == 1 && !s.nodes.empty() && all_identity(s.b)) {
        std::vector<cplx> w;
        for (const auto& c : s.c) w.push_back(c(0, 0));
        try {
            SchurFunction f = schur_interpolate(s.nodes, w, o.psd_tol);
            json num = json::array(), den = json::array();
            for (auto z : f.num) num.push_back(to_json(z));
            for (auto z : f.den) den.push_back(to_json(z));
            r.data = {{"solver", "schur"},
                      {"outcome", "SOLVED"},
                      {"numerator", num},
                      {"denominator", den},
                      {"interpolation_residual", f.interpolation_residual},
                      {"boundary_max", f.boundary_max}};
            std::ostringstream os;
            os << "schur interpolant f = p/q\n  p:";
            for (auto z : f.num) os << " " << fmt(z);
            os << "\n  q:";
            for (auto z : f.den) os << " " << fmt(z);
            os << "\nmax |f(z_i) - w_i| = " << fmt(f.interpolation_residual) << ", max |f| on the circle = "
               << fmt(f.boundary_max) << "\n";
            r.text = os.str();
            r.status = "pass";
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Infeasible) throw;
            r.data = {{"solver", "schur"}, {"outcome", "INFEASIBLE"}, {"reason", e.what()}};
            r.text = std::string("INFEASIBLE: ") + e.what() + "\n";
            r.status = "fail";
        }
        return r;
    }
    FockPtr fock = fock_truncate(s.corr, o.truncation);
    try {
        TruncatedSolveResult res = truncated_feasibility_solve(s.pick_problem(), fock, o.solve_tol, o.max_iter);
        json coeffs = json::array();
        for (const auto& v : res.x.coefficients()) coeffs.push_back(to_json(v));
        r.data = {{"solver", "truncated"},
                  {"outcome", to_string(res.status)},
                  {"label", res.exact ? "EXACT" : "HEURISTIC"},
                  {"element", coeffs},
                  {"norm", res.norm},
                  {"residual", res.residual},
                  {"iterations", res.iterations}};
        std::ostringstream os;
        os << "truncated solve (" << (res.exact ? "EXACT" : "HEURISTIC") << "): " << to_string(res.status) << "\n";
        for (size_t g = 0; g < res.x.coefficients().size(); ++g)
            os << "  X_" << g << " = " << fmt(Mat(res.x.coefficient(static_cast<int>(g)).transpose()), "");
        os << "truncated norm " << fmt(res.norm) << ", max ||B_i X(eta_i^*) - C_i|| = " << fmt(res.residual) << "\n";
        r.text = os.str();
        r.status = res.status == SolveStatus::Solved ? "pass" : "undecided";
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Infeasible) throw;
        r.data = {{"solver", "truncated"}, {"outcome", "INFEASIBLE"}, {"reason", e.what()}};
        r.text = std::string("INFEASIBLE: ") + e.what() + "\n";
        r.status = "fail";
    }
    return r;
}

Report run_eval(const ProblemSpec& s) {
    Report r;
    require_points(s, false);
    FockPtr fock = fock_truncate(s.corr, s.options.truncation);
    HardyElement x = spec_element(s, fock);
    const HardyNorm hn = hardy_norm(x);
    json rows = json::array();
    bool ok = true;
    std::ostringstream os;
    for (int i = 0; i < s.k(); ++i) {
        const DualPoint& eta = s.points[i];
        Mat e1 = evaluate(x, eta, s.sigma);
        Mat e2 = cauchy_evaluate(x, eta, s.sigma, fock->truncation());
        const double gap = (e1 - e2).norm();
        const double bound = fock->nilpotent() ? 1e-10
                                               : std::pow(eta.norm, fock->truncation() + 1) * hn.value / (1.0 - eta.norm) + 1e-10;
        ok = ok && gap <= bound;
        rows.push_back({{"value", to_json(e1)}, {"cauchy", to_json(e2)}, {"gap", gap}, {"bound", bound}, {"eta_norm", eta.norm}});
        os << "point " << i << " (||eta|| = " << fmt(eta.norm) << "): X(eta^*) =\n"
           << fmt(e1) << "  route gap " << fmt(gap) << " (bound " << fmt(bound) << ")\n";
    }
    r.data = {{"points", rows}, {"hardy_norm", hn.value}, {"norm_exact", hn.exact}};
    r.text = os.str();
    r.status = ok ? "pass" : "fail";
    return r;
}

Report run_dual(const ProblemSpec& s) {
    Report r;
    DoubleDualReport dd = double_dual_check(s.corr, s.sigma);
    json maps = json::array();
    for (const auto& m : s.dual->maps) maps.push_back(to_json(m));
    r.data = {{"dim_e", dd.dim_e},
              {"dim_dual", dd.dim_dual},
              {"dim_double_dual", dd.dim_double_dual},
              {"dim_h", s.sigma.dim()},
              {"commutant_blocks", s.dual->comm.algebra.block_sizes()},
              {"dual_basis", maps},
              {"mu_unitary", dd.mu_unitary},
              {"w_isometry", dd.w_isometry},
              {"w_bimodule", dd.w_bimodule},
              {"w_intertwining", dd.w_intertwining},
              {"w_rank_defect", dd.w_rank_defect},
              {"commutant_residual", dd.commutant_residual},
              {"passed", dd.passed(1e-9)}};
    std::ostringstream os;
    os << "dim E = " << dd.dim_e << ", dim E^sigma = " << dd.dim_dual << ", dim of the double dual = " << dd.dim_double_dual
       << "\nW residuals: isometry " << fmt(dd.w_isometry) << ", bimodule " << fmt(dd.w_bimodule) << ", intertwining "
       << fmt(dd.w_intertwining) << "; mu unitary " << fmt(dd.mu_unitary) << "\n";
    r.text = os.str();
    r.status = dd.passed(1e-9) ? "pass" : "fail";
    return r;
}

Report run_dilate(const ProblemSpec& s) {
    Report r;
    require_points(s, false);
    const int n = s.options.truncation;
    FockPtr fock = fock_truncate(s.corr, n);
    auto induced = std::make_shared<const InducedFock>(fock, s.sigma);
    json rows = json::array();
    bool ok = true;
    std::ostringstream os;
    for (int i = 0; i < s.k(); ++i) {
        CovariantRep rep(induced, s.points[i]);
        Dilation dil = minimal_isometric_dilation(rep, n);
        WoldReport w = wold_check(dil);
        CncReport c = cnc_classify(rep, n);
        const bool good = dil.isometry_residual < 1e-10 && dil.compression_residual < 1e-10 &&
                          dil.dilation_residual < 1e-10 && w.bound_violation <= 0.0 && w.monotone;
        ok = ok && good;
        rows.push_back({{"t_norm", w.t_norm},
                        {"dim_k", dil.dim()},
                        {"isometry_residual", dil.isometry_residual},
                        {"compression_residual", dil.compression_residual},
                        {"dilation_residual", dil.dilation_residual},
                        {"power_route_gap", dil.power_route_checked ? json(dil.power_route_gap) : json(nullptr)},
                        {"coisometric", dil.coisometric},
                        {"wold_column_norms", w.column_norm},
                        {"wold_bound_violation", w.bound_violation},
                        {"wold_monotone", w.monotone},
                        {"p_infinity", w.p_infinity},
                        {"induced", w.induced},
                        {"h1_dim", c.h1.cols()},
                        {"cnc", c.is_cnc},
                        {"c0", c.is_c0},
                        {"cnc_exact", c.exact},
                        {"degree", c.degree},
                        {"theta_spectral_radius", c.theta_spectral_radius},
                        {"decay", c.decay}});
        os << "point " << i << ": ||T~|| = " << fmt(w.t_norm) << ", dim K = " << dil.dim() << "\n  isometry "
           << fmt(dil.isometry_residual) << ", compression " << fmt(dil.compression_residual) << ", dilation "
           << fmt(dil.dilation_residual) << "\n  CNC " << (c.is_cnc ? "yes" : "no")
           << (c.exact ? "" : " (up to degree " + std::to_string(c.degree) + ")") << ", C.0 " << (c.is_c0 ? "yes" : "no")
           << ", P_inf estimate " << fmt(w.p_infinity) << "\n  Wold decay ||V_k V_k^*|| on columns 1..3:\n";
        for (size_t k = 0; k < w.column_norm.size(); ++k) {
            os << "    k=" << k << ":";
            for (size_t m = 0; m < std::min<size_t>(3, w.column_norm[k].size()); ++m) os << " " << fmt(w.column_norm[k][m]);
            os << "\n";
        }
    }
    r.data = {{"points", rows}};
    r.text = os.str();
    r.status = ok ? "pass" : "fail";
    return r;
}

Report run_distance(const ProblemSpec& s) {
    Report r;
    if (s.kind != "nest") throw SpecError("/problem/correspondence/kind", "distance needs kind 'nest'");
    if (!s.t) throw SpecError("/problem/T", "distance needs an operator T");
    const Nest nest = spec_nest(s);
    std::ostringstream os;
    bool ok = true;
    const double arv = arveson_distance(nest, *s.t), arv_o = arveson_distance_oracle(nest, *s.t);
    ok = ok && std::abs(arv - arv_o) < 1e-6;
    r.data["algebra"] = {{"formula", arv}, {"oracle", arv_o}};
    os << "dist(T, Alg N): formula " << fmt(arv) << ", oracle " << fmt(arv_o) << "\n";
    if (!s.intervals.empty()) {
        const double f = distance_to_ideal(nest, *s.t, s.intervals);
        const double o = ideal_distance_oracle(nest, *s.t, s.intervals);
        ok = ok && std::abs(f - o) < 1e-6;
        r.data["ideal"] = {{"formula", f}, {"oracle", o}};
        os << "dist(T, J): formula " << fmt(f) << ", oracle " << fmt(o) << "\n";
    }
    r.text = os.str();
    r.status = ok ? "pass" : "fail";
    return r;
}

Report run_sweep(const ProblemSpec& s) {
    Report r;
    require_points(s, true);
    auto entries = boundary_sweep(s.pick_problem(), s.options.r_grid);
    json rows = json::array();
    // The verdict is the certificate closest to the boundary.
    bool last = true;
    double r_max = -1.0;
    std::ostringstream os;
    os << "r        feasible  lambda_min\n";
    for (const auto& e : entries) {
        rows.push_back({{"r", e.r}, {"feasible", e.certificate.feasible}, {"lambda_min", e.certificate.lambda_min}});
        if (e.r > r_max) {
            r_max = e.r;
            last = e.certificate.feasible;
        }
        os << std::left << std::setw(9) << fmt(e.r) << std::setw(10) << (e.certificate.feasible ? "yes" : "no")
           << fmt(e.certificate.lambda_min) << "\n";
    }
    os << "(the sweep uses constant targets C_i; it is a conservative check)\n";
    r.data = {{"sweep", rows}, {"conservative", true}};
    r.text = os.str();
    r.status = last ? "pass" : "fail";
    return r;
}

DualPoint random_point(const DualCorrespondence& d, Rng& rng, double norm) {
    Mat m = Mat::Zero(d.eh.dim(), d.sigma.dim());
    for (const auto& b : d.maps) m += random_complex(rng) * b;
    DualPoint p = make_point(d, m);
    return p.norm > 0.0 ? make_point(d, m * (norm / p.norm)) : p;
}

HardyElement random_element(const FockPtr& fock, Rng& rng, bool vanish_at_zero) {
    std::vector<Vec> coeffs;
    for (int g = 0; g <= fock->truncation(); ++g)
        coeffs.push_back(g == 0 && vanish_at_zero ? Vec::Zero(fock->grade_dim(0)) : random_vector(rng, fock->grade_dim(g)));
    return HardyElement(fock, coeffs);
}

Report run_verify(const ProblemSpec& s) {
    Report r;
    const std::uint64_t seed = seed_from_env(20240611);
    Rng rng(seed);
    std::ostringstream os;
    bool ok = true;
    auto line = [&](const std::string& name, bool pass, const std::string& detail) {
        os << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        r.data["checks"].push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
        ok = ok && pass;
    };
    r.data["seed"] = seed;
    r.data["checks"] = json::array();

    DoubleDualReport dd = double_dual_check(s.corr, s.sigma);
    line("double dual", dd.passed(1e-9),
         "dim E = " + std::to_string(dd.dim_e) + ", double dual " + std::to_string(dd.dim_double_dual) +
             ", W isometry " + fmt(dd.w_isometry));

    const int n = std::min(s.options.truncation, 4);
    FockPtr fock = fock_truncate(s.corr, n);
    CommutantSetup setup = induced_and_commutant(s.sigma, fock);
    CommutantReport cr = verify_commutant(setup, 1e-10);
    line("commutant", cr.passed(1e-10),
         "generator residual " + fmt(cr.generator_residual) + ", U unitarity " + fmt(setup.u_unitarity) +
             (cr.span_checked ? ", double commutant dim " + std::to_string(cr.dim_double_commutant) : ""));

    if (!s.dual->maps.empty()) {
        double worst = 0.0;
        bool routes = true;
        for (int trial = 0; trial < 10; ++trial) {
            DualPoint eta = random_point(*s.dual, rng, uniform(rng, 0.1, 0.8));
            HardyElement x = random_element(fock, rng, false);
            const double gap = (evaluate(x, eta, s.sigma) - cauchy_evaluate(x, eta, s.sigma, n)).norm();
            worst = std::max(worst, gap);
            const double bound =
                fock->nilpotent() ? 1e-10 : std::pow(eta.norm, n + 1) * hardy_norm(x).value / (1.0 - eta.norm) + 1e-10;
            routes = routes && gap <= bound;
        }
        line("evaluation routes", routes, "10 trials, worst gap " + fmt(worst));

        if (fock->nilpotent()) {
            bool nec = true, schwartz = true;
            double worst_lambda = 0.0, worst_schwartz = 0.0;
            auto dual = s.dual;
            for (int trial = 0; trial < 10; ++trial) {
                HardyElement x = random_element(fock, rng, true);
                const double nx = hardy_norm(x).value;
                if (nx > 0.0) x = x.scaled(1.0 / nx);
                PickProblem p;
                p.dual = dual;
                p.psd_tol = s.options.psd_tol;
                for (int i = 0; i < 2; ++i) {
                    p.points.push_back(random_point(*dual, rng, uniform(rng, 0.1, 0.9)));
                    p.b.push_back(Mat::Identity(s.sigma.dim(), s.sigma.dim()));
                    p.c.push_back(evaluate(x, p.points.back(), s.sigma));
                }
                Certificate c = pick_condition(p, true);
                nec = nec && c.feasible;
                worst_lambda = std::min(worst_lambda, c.lambda_min);
                SchwartzReport sr = schwartz_check(x, dual, p.points[0], Mat::Identity(s.sigma.dim(), s.sigma.dim()), 3);
                worst_schwartz = std::min(worst_schwartz, sr.min_lambda());
                schwartz = schwartz && sr.min_lambda() >= -1e-9;
            }
            line("necessity", nec, "10 trials, worst lambda_min " + fmt(worst_lambda));
            line("schwartz", schwartz, "10 trials, worst lambda_min " + fmt(worst_schwartz));
        }
    }
    r.text = os.str();
    r.status = ok ? "pass" : "fail";
    return r;
}

}  // namespace

Report run(const std::string& command, const ProblemSpec& spec) {
    Report r;
    if (command == "check") r = run_check(spec);
    else if (command == "solve") r = run_solve(spec);
    else if (command == "eval") r = run_eval(spec);
    else if (command == "dual") r = run_dual(spec);
    else if (command == "dilate") r = run_dilate(spec);
    else if (command == "distance") r = run_distance(spec);
    else if (command == "verify") r = run_verify(spec);
    else if (command == "sweep") r = run_sweep(spec);
    else throw Error(ErrorKind::InvalidSpec, "unknown command '" + command + "'");
    r.command = command;
    r.data["spec"] = spec.source;
    return r;
}

}  // namespace hardy
