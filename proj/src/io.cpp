#include "largesol/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace largesol {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("csv: bad numeric field '" + s + "'");
    return v;
}

std::string method_name(RadialMethod m) {
    switch (m) {
        case RadialMethod::continuation: return "continuation";
        case RadialMethod::w_transform: return "w_transform";
        case RadialMethod::annulus: return "annulus";
    }
    return "continuation";
}

RadialMethod method_from(const std::string& s) {
    if (s == "continuation") return RadialMethod::continuation;
    if (s == "w_transform") return RadialMethod::w_transform;
    if (s == "annulus") return RadialMethod::annulus;
    throw std::runtime_error("csv: unknown method '" + s + "'");
}

} // namespace

void write_field_csv(const PolarField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "r_in,R,n_r,n_theta,k\n";
    out << fmt(f.grid.r_in) << ',' << fmt(f.grid.R) << ',' << f.grid.n_r << ','
        << f.grid.n_theta << ',' << fmt(f.boundary_k) << '\n';
    out << "i_r,i_theta,r,theta,u\n";
    for (int i = 0; i < f.grid.n_r; ++i) {
        for (int j = 0; j < f.grid.n_theta; ++j) {
            out << i << ',' << j << ',' << fmt(f.grid.r[i]) << ','
                << fmt(f.grid.theta[j]) << ',' << fmt(f.at(i, j)) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

PolarField read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || split_csv(line).size() != 5) {
        throw std::runtime_error("field csv: bad scalar header in " + path);
    }
    if (!std::getline(in, line)) throw std::runtime_error("field csv: truncated " + path);
    const auto scalars = split_csv(line);
    if (scalars.size() != 5) throw std::runtime_error("field csv: bad scalar row");
    const double r_in = to_double(scalars[0]);
    const double R = to_double(scalars[1]);
    const int n_r = static_cast<int>(to_double(scalars[2]));
    const int n_theta = static_cast<int>(to_double(scalars[3]));
    const double k = to_double(scalars[4]);

    PolarField f;
    f.grid = PolarGrid::build(r_in, R, n_r, n_theta);
    f.boundary_k = k;
    f.values.assign(static_cast<std::size_t>(n_r) * n_theta, 0.0);
    if (!std::getline(in, line)) throw std::runtime_error("field csv: truncated " + path);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != 5) throw std::runtime_error("field csv: bad node row");
        const int i = static_cast<int>(to_double(cols[0]));
        const int j = static_cast<int>(to_double(cols[1]));
        if (i < 0 || i >= n_r || j < 0 || j >= n_theta) {
            throw std::runtime_error("field csv: node index out of range");
        }
        f.grid.r[i] = to_double(cols[2]);
        f.grid.theta[j] = to_double(cols[3]);
        f.values[f.grid.idx(i, j)] = to_double(cols[4]);
        ++rows;
    }
    if (rows != f.values.size()) throw std::runtime_error("field csv: missing rows");
    // Rebuild the faces from the cell-centered relation r_i = (f_i + f_{i+1})/2
    // so graded grids round-trip with consistent volumes.
    f.grid.faces[0] = r_in;
    for (int i = 0; i < n_r; ++i) {
        f.grid.faces[i + 1] = 2.0 * f.grid.r[i] - f.grid.faces[i];
    }
    f.converged = true; // files carry finished solves
    return f;
}

void write_profile_csv(const RadialProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "R,N,n_r,method,k_level\n";
    out << fmt(p.R) << ',' << p.N << ',' << p.r_nodes.size() << ','
        << method_name(p.method) << ',' << fmt(p.k_level) << '\n';
    out << "i,r,u,du\n";
    for (std::size_t i = 0; i < p.r_nodes.size(); ++i) {
        out << i << ',' << fmt(p.r_nodes[i]) << ',' << fmt(p.u_values[i]) << ','
            << fmt(p.du_values[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

RadialProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || split_csv(line).size() != 5) {
        throw std::runtime_error("profile csv: bad scalar header in " + path);
    }
    if (!std::getline(in, line)) throw std::runtime_error("profile csv: truncated");
    const auto scalars = split_csv(line);
    RadialProfile p;
    p.R = to_double(scalars[0]);
    p.N = static_cast<int>(to_double(scalars[1]));
    const std::size_t n = static_cast<std::size_t>(to_double(scalars[2]));
    p.method = method_from(scalars[3]);
    p.k_level = to_double(scalars[4]);
    if (!std::getline(in, line)) throw std::runtime_error("profile csv: truncated");
    p.r_nodes.reserve(n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != 4) throw std::runtime_error("profile csv: bad node row");
        p.r_nodes.push_back(to_double(cols[1]));
        p.u_values.push_back(to_double(cols[2]));
        p.du_values.push_back(to_double(cols[3]));
    }
    if (p.r_nodes.size() != n) throw std::runtime_error("profile csv: missing rows");
    p.converged = true;
    return p;
}

void write_xy(const std::string& path, const std::vector<double>& x,
              const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("write_xy: length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << fmt(x[i]) << ' ' << fmt(y[i]) << '\n';
    }
}

void write_inner_data(const std::string& path, const std::vector<double>& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (double v : data) out << fmt(v) << '\n';
}

} // namespace largesol
