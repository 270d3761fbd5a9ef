#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hardy/problem.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Interpolation and dilation toolkit for Hardy algebras of W*-correspondences"};
    app.require_subcommand(1, 1);

    std::string input, json_out;
    std::optional<int> truncation, max_iter;
    std::optional<double> psd_tol, solve_tol;
    std::vector<double> r_grid;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"check", "test the Pick condition and print the certificate"},
        {"solve", "construct an interpolant or report infeasibility"},
        {"eval", "evaluate a Hardy element at the points by two routes"},
        {"dual", "print the dual and double dual correspondences"},
        {"dilate", "minimal isometric dilation, Wold decay and CNC classification"},
        {"distance", "distance to a nest algebra or nest ideal, formula vs oracle"},
        {"verify", "run the randomized property suite (seed from HARDY_SEED)"},
        {"sweep", "boundary sweep of the Pick condition over the r grid"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--input,-i", input, "problem file (JSON)")->required();
        sub->add_option("--truncation", truncation, "Fock space truncation N");
        sub->add_option("--psd-tol", psd_tol, "tolerance for positive semidefiniteness");
        sub->add_option("--solve-tol", solve_tol, "solver tolerance");
        sub->add_option("--max-iter", max_iter, "solver iteration cap");
        sub->add_option("--r-grid", r_grid, "radii for the sweep")->delimiter(',');
        sub->add_option("--json-out", json_out, "write the JSON report here");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    hardy::Report report;
    try {
        std::ifstream in(input);
        if (!in) throw hardy::SpecError("", "cannot open " + input);
        hardy::json j;
        try {
            j = hardy::json::parse(in);
        } catch (const hardy::json::parse_error& e) {
            throw hardy::SpecError("", std::string("invalid JSON: ") + e.what());
        }
        if (j.is_object()) {
            auto& o = j["options"];
            if (!o.is_object() && !o.is_null()) throw hardy::SpecError("/options", "expected an object");
            if (truncation) o["truncation"] = *truncation;
            if (psd_tol) o["psd_tol"] = *psd_tol;
            if (solve_tol) o["solve_tol"] = *solve_tol;
            if (max_iter) o["max_iter"] = *max_iter;
            if (!r_grid.empty()) o["r_grid"] = r_grid;
            if (o.is_null()) j.erase("options");
        }
        report = hardy::run(command, hardy::parse_problem(j));
    } catch (const hardy::SpecError& e) {
        std::cerr << "input error at " << e.what() << "\n";
        report.command = command;
        report.status = "error";
        report.data = {{"error", e.what()}, {"pointer", e.pointer()}};
    } catch (const hardy::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        report.command = command;
        report.status = "error";
        report.data = {{"error", e.what()}};
    }

    std::cout << report.text;
    if (report.status != "error") std::cout << "status: " << report.status << "\n";
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) {
            std::cerr << "cannot write " << json_out << "\n";
            return 3;
        }
        out << report.to_json().dump(2) << "\n";
    }
    return report.exit_code();
}
