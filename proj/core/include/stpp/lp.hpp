#pragma once

#include <map>
#include <string>
#include <vector>

namespace stpp {

// Minimal linear program container:
//   min c'x  s.t. per-row  a'x {<=,=,>=} rhs,  x >= 0.
// Upper bounds are not modeled explicitly; path-choice variables are bounded
// by their convexity rows and tau/z columns are unbounded above.
struct LinearProgram {
    std::string name = "model";
    std::vector<double> obj;
    std::vector<std::string> col_names;
    std::vector<char> col_kind;  // 'c' continuous, 'i' integer, 'b' binary

    struct Row {
        std::string name;
        std::vector<std::pair<int, double>> coef;
        char sense;  // 'L', 'G', 'E'
        double rhs;
    };
    std::vector<Row> rows;

    int n_cols() const { return static_cast<int>(obj.size()); }
    int add_col(const std::string& name, double objective, char kind = 'c');
    void add_row(const std::string& name, std::vector<std::pair<int, double>> coef, char sense,
                 double rhs);
};

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded, IterLimit };
    Status status = Status::IterLimit;
    double value = 0;
    std::vector<double> x;
};

// Two-phase dense primal simplex. Deterministic: Dantzig pricing with a Bland
// fallback after a degeneracy streak, lowest-index tie breaks in the ratio
// test.
LpResult solve_lp(const LinearProgram& lp, long long max_iters = 200000);

// CPLEX LP text format (objective, constraints, bounds, integrality, End).
void write_lp_file(const LinearProgram& lp, const std::string& path);
std::string lp_file_text(const LinearProgram& lp);

// Plain text solution file: one "<variable> <value>" pair per line,
// '#' or '\' starts a comment. '=' separators are tolerated.
std::map<std::string, double> read_solution_file(const std::string& path);
std::map<std::string, double> parse_solution_text(const std::string& text);

}  // namespace stpp
