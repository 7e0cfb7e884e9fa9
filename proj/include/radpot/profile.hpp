#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radpot {

/// Radial profile in the rescaled variable: v(t) with derivative dv = v'(t).
struct VProfile {
    std::vector<double> t, v, dv;
};

/// Radial profile in the original variable: phi(r) with dphi = phi'(r).
struct PhiProfile {
    std::vector<double> r, phi, dphi;
};

inline std::vector<double> make_log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw std::domain_error("make_log_grid: bad range");
    std::vector<double> g(n);
    const double la = std::log(lo), step = (std::log(hi) - la) / (n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(la + i * step);
    g.front() = lo;
    g.back() = hi;
    return g;
}

namespace fd {

/// Fornberg weights: derivative of order m at x0 from arbitrary nodes x.
/// Returns weights c[j] so that f^(m)(x0) ~ sum c[j] f(x[j]).
inline std::vector<double> weights(double x0, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n + 1);
    for (int j = 0; j <= n; ++j) out[j] = c[j][m];
    return out;
}

/// Derivative of order m of samples y on a strictly increasing grid x,
/// five-point stencils (fourth order on smooth grids), one-sided at the ends.
inline std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& y,
                                      int m = 1) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 5) throw std::domain_error("fd::derivative: need >= 5 points");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i < 2 ? 0 : (i + 2 >= n ? n - 5 : i - 2);
        std::vector<double> xs(x.begin() + lo, x.begin() + lo + 5);
        const auto w = weights(x[i], xs, m);
        double s = 0.0;
        for (int j = 0; j < 5; ++j) s += w[j] * y[lo + j];
        out[i] = s;
    }
    return out;
}

} // namespace fd

/// Derivative dv/dt computed in the log coordinate x = ln t, which keeps the
/// stencils well conditioned on geometric grids.
inline std::vector<double> log_grid_derivative(const std::vector<double>& t,
                                               const std::vector<double>& v) {
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) throw std::domain_error("log_grid_derivative: t > 0 required");
        x[i] = std::log(t[i]);
    }
    auto d = fd::derivative(x, v, 1);
    for (std::size_t i = 0; i < t.size(); ++i) d[i] /= t[i];
    return d;
}

inline VProfile make_profile(std::vector<double> t, std::vector<double> v) {
    VProfile p;
    p.dv = log_grid_derivative(t, v);
    p.t = std::move(t);
    p.v = std::move(v);
    return p;
}

template <class F>
VProfile sample_profile(const std::vector<double>& t, F&& f) {
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = f(t[i]);
    return make_profile(t, std::move(v));
}

/// Piecewise cubic Hermite interpolant in x = ln t.  Positive data is
/// interpolated in ln v (exact on power laws and exponential tails after the
/// log-grid map); data with zero or negative entries falls back to linear
/// scale in v.
class ProfileInterp {
  public:
    ProfileInterp(const std::vector<double>& t, const std::vector<double>& v) {
        if (t.size() != v.size() || t.size() < 5)
            throw std::domain_error("ProfileInterp: need >= 5 points");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1])) throw std::domain_error("ProfileInterp: t must increase");
        x_.resize(t.size());
        y_.resize(t.size());
        log_y_ = std::all_of(v.begin(), v.end(), [](double a) { return a > 0.0; });
        for (std::size_t i = 0; i < t.size(); ++i) {
            x_[i] = std::log(t[i]);
            y_[i] = log_y_ ? std::log(v[i]) : v[i];
        }
        slope_ = fd::derivative(x_, y_, 1);
    }

    double operator()(double t) const {
        const double x = std::log(t);
        const auto hi = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = hi == x_.begin() ? 0 : static_cast<std::size_t>(hi - x_.begin()) - 1;
        i = std::min(i, x_.size() - 2);
        const double h = x_[i + 1] - x_[i], s = (x - x_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double y = (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * slope_[i] +
                         (-2 * s3 + 3 * s2) * y_[i + 1] + (s3 - s2) * h * slope_[i + 1];
        return log_y_ ? std::exp(y) : y;
    }

    bool positive() const { return log_y_; }

  private:
    std::vector<double> x_, y_, slope_;
    bool log_y_ = false;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    return out;
}

inline void read_columns(std::istream& in, const char* h0, const char* h1, const char* h2,
                         std::vector<double>& c0, std::vector<double>& c1,
                         std::vector<double>& c2) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("profile csv: empty file");
    const auto hdr = split_csv_line(line);
    if (hdr.size() < 3 || hdr[0] != h0 || hdr[1] != h1 || hdr[2] != h2)
        throw std::runtime_error(std::string("profile csv: expected header ") + h0 + "," + h1 +
                                 "," + h2);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 3) throw std::runtime_error("profile csv: short row");
        c0.push_back(std::stod(cells[0]));
        c1.push_back(std::stod(cells[1]));
        c2.push_back(std::stod(cells[2]));
    }
    for (std::size_t i = 1; i < c0.size(); ++i)
        if (!(c0[i] > c0[i - 1]))
            throw std::runtime_error("profile csv: grid must be strictly increasing");
}

} // namespace detail

inline VProfile read_v_profile_csv(std::istream& in) {
    VProfile p;
    detail::read_columns(in, "t", "v", "dv", p.t, p.v, p.dv);
    return p;
}

inline PhiProfile read_phi_profile_csv(std::istream& in) {
    PhiProfile p;
    detail::read_columns(in, "r", "phi", "dphi", p.r, p.phi, p.dphi);
    return p;
}

inline VProfile read_v_profile_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_v_profile_csv(f);
}

inline PhiProfile read_phi_profile_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_phi_profile_csv(f);
}

inline void write_v_profile_csv(std::ostream& out, const VProfile& p) {
    out << "t,v,dv\n";
    out.precision(17);
    for (std::size_t i = 0; i < p.t.size(); ++i)
        out << p.t[i] << ',' << p.v[i] << ',' << p.dv[i] << '\n';
}

inline void write_phi_profile_csv(std::ostream& out, const PhiProfile& p) {
    out << "r,phi,dphi\n";
    out.precision(17);
    for (std::size_t i = 0; i < p.r.size(); ++i)
        out << p.r[i] << ',' << p.phi[i] << ',' << p.dphi[i] << '\n';
}

inline void write_v_profile_csv(const std::string& path, const VProfile& p) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    write_v_profile_csv(f, p);
}

inline void write_phi_profile_csv(const std::string& path, const PhiProfile& p) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    write_phi_profile_csv(f, p);
}

} // namespace radpot
