#include "hkfloer/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hkfloer {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<char*>(&v), 8); }
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

}  // namespace

void write_field_binary(const std::string& path, const FieldMap& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os.write("HKFB", 4);
    put_u32(os, 1);  // version
    const auto& d = *f.domain;
    put_u32(os, d.kind == DomainKind::Sphere3 ? 0 : 1);
    put_u32(os, d.degree);
    put_u32(os, d.res_angle);
    put_u32(os, d.res_radial);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) put_f64(os, d.frame(i, j));
    put_u32(os, f.target.n);
    put_u32(os, f.target.lattice ? 1 : 0);
    put_f64(os, f.target.lattice.value_or(0.0));
    put_u32(os, f.contractible ? 1 : 0);
    put_u32(os, static_cast<std::uint32_t>(f.winding.size()));
    for (int i = 0; i < f.winding.size(); ++i) put_u32(os, std::uint32_t(f.winding[i]));
    put_u32(os, d.num_nodes());
    put_u32(os, static_cast<std::uint32_t>(f.values.rows()));
    for (int r = 0; r < f.values.rows(); ++r)
        for (int p = 0; p < f.values.cols(); ++p) put_f64(os, f.values(r, p));
}

FieldMap read_field_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::strncmp(magic, "HKFB", 4) != 0) throw ConfigError("bad field container magic");
    if (get_u32(is) != 1) throw ConfigError("unsupported field container version");
    const bool torus = get_u32(is) == 1;
    const int degree = int(get_u32(is));
    const int res_angle = int(get_u32(is));
    const int res_radial = int(get_u32(is));
    Eigen::Matrix3d frame;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) frame(i, j) = get_f64(is);
    Target target;
    target.n = int(get_u32(is));
    const bool has_lattice = get_u32(is) == 1;
    const double lattice = get_f64(is);
    if (has_lattice) target.lattice = lattice;
    const bool contractible = get_u32(is) == 1;
    const int wsize = int(get_u32(is));
    Eigen::VectorXi winding(wsize);
    for (int i = 0; i < wsize; ++i) winding[i] = int(get_u32(is));
    const int P = int(get_u32(is));
    const int rows = int(get_u32(is));

    auto d = torus ? build_torus_domain(frame, res_radial, degree)
                   : build_sphere_domain(degree, res_angle, res_radial);
    if (d->num_nodes() != P) throw ConfigError("field container node count mismatch");
    Eigen::MatrixXd values(rows, P);
    for (int r = 0; r < rows; ++r)
        for (int p = 0; p < P; ++p) values(r, p) = get_f64(is);
    if (!is) throw ConfigError("truncated field container");
    FieldMap f = field_from_values(d, target, values);
    f.contractible = contractible;
    f.winding = winding;
    return f;
}

void write_field_csv(const std::string& path, const FieldMap& f) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    const auto& d = *f.domain;
    os << "# kind=" << (d.kind == DomainKind::Sphere3 ? "sphere3" : "torus3")
       << " degree=" << d.degree << " n=" << f.target.n << " lattice="
       << (f.target.lattice ? std::to_string(*f.target.lattice) : std::string("none"))
       << "\n";
    os << std::setprecision(17);
    const int cdim = static_cast<int>(d.nodes.cols());
    for (int p = 0; p < d.num_nodes(); ++p) {
        for (int c = 0; c < cdim; ++c) os << d.nodes(p, c) << ",";
        os << d.weights[p];
        for (int r = 0; r < f.values.rows(); ++r) os << "," << f.values(r, p);
        os << "\n";
    }
}

namespace {

int harmonic_degree_tag(double mu) {
    // mu^2 + 2 mu = d(d+2)  =>  d = |mu + 1| - 1
    const double d = std::abs(mu + 1.0) - 1.0;
    return int(std::lround(d));
}

}  // namespace

void write_spectrum_csv(const std::string& path, const SpectralDecomposition& s) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << "index,eigenvalue,residual,degree\n" << std::setprecision(17);
    for (int i = 0; i < s.eigenvalues.size(); ++i)
        os << i << "," << s.eigenvalues[i] << "," << s.residuals[i] << ","
           << harmonic_degree_tag(s.eigenvalues[i]) << "\n";
}

void write_eigentrack_csv(const std::string& path, const SpectralFlowResult& r) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << "t";
    if (!r.eigenvalues.empty())
        for (int i = 0; i < r.eigenvalues.front().size(); ++i) os << ",ev" << i;
    os << "\n" << std::setprecision(17);
    for (std::size_t k = 0; k < r.t_samples.size(); ++k) {
        os << r.t_samples[k];
        for (int i = 0; i < r.eigenvalues[k].size(); ++i) os << "," << r.eigenvalues[k][i];
        os << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const TrajectorySolution& u,
                          const HamiltonianSpec& H) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << "s,action_eps,dsu_l2,oscillation\n" << std::setprecision(17);
    for (std::size_t i = 0; i < u.slices.size(); ++i) {
        const FieldMap du = u.s_derivative(static_cast<int>(i), H);
        const Eigen::VectorXd mean = mean_value(u.slices[i]);
        double osc = 0.0;
        for (int p = 0; p < u.slices[i].domain->num_nodes(); ++p)
            osc = std::max(osc, (u.slices[i].values.col(p) - mean).norm());
        os << u.s_grid[i] << "," << u.action_values[i] << ","
           << std::sqrt(u.slices[i].domain->kappa) * du.l2_norm() << "," << osc << "\n";
    }
}

void write_trajectory_binary(const std::string& path, const TrajectorySolution& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os.write("HKFT", 4);
    put_u32(os, 1);
    put_f64(os, u.epsilon);
    put_u32(os, static_cast<std::uint32_t>(u.slices.size()));
    for (int i = 0; i < u.s_grid.size(); ++i) put_f64(os, u.s_grid[i]);
    for (const auto& slice : u.slices)
        for (int r = 0; r < slice.values.rows(); ++r)
            for (int p = 0; p < slice.values.cols(); ++p) put_f64(os, slice.values(r, p));
}

void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-300) xmax = xmin + 1;
    if (ymax - ymin < 1e-300) {
        ymax += 0.5;
        ymin -= 0.5;
    }
    const double W = 720, Hh = 480, L = 70, R = 20, T = 40, Bm = 50;
    auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto Y = [&](double y) { return Hh - Bm - (y - ymin) / (ymax - ymin) * (Hh - T - Bm); };

    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << std::setprecision(8);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh
       << "\" viewBox=\"0 0 " << W << " " << Hh << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << Hh - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << Hh / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << Hh / 2
       << ")\">" << ylabel << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << Y(ymin) << "\" x2=\"" << W - R << "\" y2=\""
       << Y(ymin) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << Y(ymin) << "\" x2=\"" << L << "\" y2=\""
       << Y(ymax) << "\" stroke=\"black\"/>\n";
    // zero line if visible
    if (ymin < 0 && ymax > 0)
        os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << W - R << "\" y2=\""
           << Y(0) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    for (int k = 0; k < 5; ++k) {
        const double yv = ymin + k * (ymax - ymin) / 4;
        os << "<text x=\"" << L - 6 << "\" y=\"" << Y(yv) + 4
           << "\" text-anchor=\"end\" font-size=\"10\">" << yv << "</text>\n";
        const double xv = xmin + k * (xmax - xmin) / 4;
        os << "<text x=\"" << X(xv) << "\" y=\"" << Y(ymin) + 16
           << "\" text-anchor=\"middle\" font-size=\"10\">" << xv << "</text>\n";
    }
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << X(s.x[i]) << "," << Y(s.y[i]) << " ";
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace hkfloer
