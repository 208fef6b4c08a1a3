#include "stpp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stpp {

int LinearProgram::add_col(const std::string& name, double objective, char kind) {
    obj.push_back(objective);
    col_names.push_back(name);
    col_kind.push_back(kind);
    return static_cast<int>(obj.size()) - 1;
}

void LinearProgram::add_row(const std::string& name, std::vector<std::pair<int, double>> coef,
                            char sense, double rhs) {
    rows.push_back({name, std::move(coef), sense, rhs});
}

namespace {

constexpr double kEps = 1e-9;

// Dense tableau simplex over equalities with an explicit basis.
struct Tableau {
    int m, n;                            // rows, structural+slack columns
    std::vector<std::vector<double>> a;  // m x n
    std::vector<double> b;               // m, kept >= 0 by pivoting rules
    std::vector<double> c;               // n, current objective
    std::vector<int> basis;              // m, column index basic in each row
    double shift = 0;                    // objective value of the basis

    void price_out(int row, int col) {
        // Make column `col` basic in `row`.
        double piv = a[row][col];
        for (int j = 0; j < n; ++j) a[row][j] /= piv;
        b[row] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = a[i][col];
            if (f == 0) continue;
            for (int j = 0; j < n; ++j) a[i][j] -= f * a[row][j];
            b[i] -= f * b[row];
        }
        double f = c[col];
        if (f != 0) {
            for (int j = 0; j < n; ++j) c[j] -= f * a[row][j];
            shift -= f * b[row];
        }
        basis[row] = col;
    }

    // Returns false when optimal, throws UnboundedTag when unbounded.
    struct UnboundedTag {};
    bool iterate(bool bland) {
        int enter = -1;
        if (bland) {
            for (int j = 0; j < n; ++j) {
                if (c[j] < -kEps) {
                    enter = j;
                    break;
                }
            }
        } else {
            double best = -kEps;
            for (int j = 0; j < n; ++j) {
                if (c[j] < best) {
                    best = c[j];
                    enter = j;
                }
            }
        }
        if (enter < 0) return false;

        int leave = -1;
        double best_ratio = 0;
        for (int i = 0; i < m; ++i) {
            if (a[i][enter] <= kEps) continue;
            double ratio = b[i] / a[i][enter];
            if (leave < 0 || ratio < best_ratio - kEps ||
                (ratio < best_ratio + kEps && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) throw UnboundedTag{};
        price_out(leave, enter);
        return true;
    }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, long long max_iters) {
    const int n_struct = lp.n_cols();
    const int m = static_cast<int>(lp.rows.size());

    // Column layout: structural | slack/surplus | artificial.
    int n_slack = 0;
    for (const auto& r : lp.rows)
        if (r.sense != 'E') ++n_slack;

    Tableau t;
    t.m = m;
    t.n = n_struct + n_slack;
    std::vector<int> art_of_row(m, -1);

    t.a.assign(m, std::vector<double>(n_struct + n_slack, 0.0));
    t.b.assign(m, 0.0);
    t.basis.assign(m, -1);

    int slack_at = n_struct;
    for (int i = 0; i < m; ++i) {
        const auto& r = lp.rows[i];
        double sign = r.rhs < 0 ? -1.0 : 1.0;  // normalize rhs >= 0
        for (const auto& [j, v] : r.coef) t.a[i][j] += sign * v;
        t.b[i] = sign * r.rhs;
        char sense = r.sense;
        if (sign < 0) sense = sense == 'L' ? 'G' : (sense == 'G' ? 'L' : 'E');
        if (sense == 'L') {
            t.a[i][slack_at] = 1.0;
            t.basis[i] = slack_at;
            ++slack_at;
        } else if (sense == 'G') {
            t.a[i][slack_at] = -1.0;
            ++slack_at;
        }
    }

    // Phase 1 artificial columns for rows without a basic slack.
    int n_art = 0;
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < 0) ++n_art;
    int total = t.n + n_art;
    for (int i = 0; i < m; ++i) t.a[i].resize(total, 0.0);
    int art_at = t.n;
    for (int i = 0; i < m; ++i) {
        if (t.basis[i] >= 0) continue;
        t.a[i][art_at] = 1.0;
        t.basis[i] = art_at;
        art_of_row[i] = art_at;
        ++art_at;
    }

    LpResult res;
    long long iters = 0;
    long long degenerate_streak = 0;

    auto run = [&](Tableau& tab) -> bool {
        bool bland = false;
        try {
            while (tab.iterate(bland)) {
                if (++iters > max_iters) return false;
                // Crude cycling guard: after many iterations switch to Bland.
                if (++degenerate_streak > 2000) bland = true;
            }
        } catch (const Tableau::UnboundedTag&) {
            res.status = LpResult::Status::Unbounded;
            return false;
        }
        return true;
    };

    if (n_art > 0) {
        Tableau p1 = t;
        p1.n = total;
        p1.c.assign(total, 0.0);
        p1.shift = 0;
        for (int j = t.n; j < total; ++j) p1.c[j] = 1.0;
        // Price out the initial artificial basis.
        for (int i = 0; i < m; ++i) {
            if (art_of_row[i] < 0) continue;
            for (int j = 0; j < total; ++j) p1.c[j] -= p1.a[i][j];
            p1.shift += p1.b[i];
        }
        if (!run(p1)) {
            if (res.status != LpResult::Status::Unbounded) res.status = LpResult::Status::IterLimit;
            return res;
        }
        if (p1.shift > 1e-7) {
            res.status = LpResult::Status::Infeasible;
            return res;
        }
        // Drive leftover artificials out of the basis where possible.
        for (int i = 0; i < m; ++i) {
            if (p1.basis[i] < t.n) continue;
            int enter = -1;
            for (int j = 0; j < t.n; ++j) {
                if (std::abs(p1.a[i][j]) > 1e-7) {
                    enter = j;
                    break;
                }
            }
            if (enter >= 0) p1.price_out(i, enter);
            // A fully zero row is redundant; the artificial stays at zero.
        }
        t.a = std::move(p1.a);
        t.b = std::move(p1.b);
        t.basis = p1.basis;
        for (int i = 0; i < m; ++i)
            for (int j = t.n; j < total; ++j) t.a[i][j] = 0.0;  // freeze artificials
    }

    // Phase 2.
    t.c.assign(total, 0.0);
    for (int j = 0; j < n_struct; ++j) t.c[j] = lp.obj[j];
    t.shift = 0;
    for (int i = 0; i < m; ++i) {
        int bj = t.basis[i];
        double f = t.c[bj];
        if (f == 0) continue;
        for (int j = 0; j < total; ++j) t.c[j] -= f * t.a[i][j];
        t.shift -= f * t.b[i];
    }
    {
        Tableau* tab = &t;
        tab->n = total;
        degenerate_streak = 0;
        if (!run(*tab)) {
            if (res.status != LpResult::Status::Unbounded) res.status = LpResult::Status::IterLimit;
            return res;
        }
    }

    res.status = LpResult::Status::Optimal;
    res.x.assign(n_struct, 0.0);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n_struct) res.x[t.basis[i]] = t.b[i];
    res.value = 0;
    for (int j = 0; j < n_struct; ++j) res.value += lp.obj[j] * res.x[j];
    return res;
}

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string lp_file_text(const LinearProgram& lp) {
    std::ostringstream os;
    os << "\\ " << lp.name << "\n";
    os << "Minimize\n obj:";
    for (int j = 0; j < lp.n_cols(); ++j) {
        if (lp.obj[j] == 0) continue;
        os << (lp.obj[j] >= 0 ? " + " : " - ") << fmt_num(std::abs(lp.obj[j])) << " "
           << lp.col_names[j];
    }
    os << "\nSubject To\n";
    for (const auto& r : lp.rows) {
        os << " " << r.name << ":";
        for (const auto& [j, v] : r.coef)
            os << (v >= 0 ? " + " : " - ") << fmt_num(std::abs(v)) << " " << lp.col_names[j];
        os << (r.sense == 'L' ? " <= " : r.sense == 'G' ? " >= " : " = ") << fmt_num(r.rhs)
           << "\n";
    }
    os << "Bounds\n";  // all columns default to [0, +inf); binaries are 0/1
    bool any_int = false, any_bin = false;
    for (char k : lp.col_kind) {
        any_int |= k == 'i';
        any_bin |= k == 'b';
    }
    if (any_int) {
        os << "Generals\n";
        for (int j = 0; j < lp.n_cols(); ++j)
            if (lp.col_kind[j] == 'i') os << " " << lp.col_names[j] << "\n";
    }
    if (any_bin) {
        os << "Binaries\n";
        for (int j = 0; j < lp.n_cols(); ++j)
            if (lp.col_kind[j] == 'b') os << " " << lp.col_names[j] << "\n";
    }
    os << "End\n";
    return os.str();
}

void write_lp_file(const LinearProgram& lp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << lp_file_text(lp);
}

std::map<std::string, double> parse_solution_text(const std::string& text) {
    std::map<std::string, double> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        for (char& c : line)
            if (c == '=') c = ' ';
        auto hash = line.find_first_of("#\\");
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string name;
        double value;
        if (ls >> name >> value) out[name] = value;
    }
    return out;
}

std::map<std::string, double> read_solution_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_solution_text(ss.str());
}

}  // namespace stpp
