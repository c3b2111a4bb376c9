#include "tinn/oracles.hpp"

#include "tinn/textio.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>

namespace tinn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNu = 0.01 / kPi;

}  // namespace

namespace {

// Orthonormal Hermite polynomial (weight e^{-x^2}) of the given degree.
double normed_hermite(double x, int degree) {
    if (degree == 0) return std::pow(kPi, -0.25);
    double hm = 0.0, h = std::pow(kPi, -0.25);
    for (int k = 0; k < degree; ++k) {
        const double next = x * std::sqrt(2.0 / (k + 1)) * h - std::sqrt(double(k) / (k + 1)) * hm;
        hm = h;
        h = next;
    }
    return h;
}

}  // namespace

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw Error("gauss_hermite: need at least one node");
    // Jacobi-matrix eigenvalues seed Newton's method; weights come from the
    // n-1 degree values, which keep relative accuracy in the far tails where
    // the eigenvector formula loses it.
    Matrix T = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(k / 2.0);
        T(k, k - 1) = b;
        T(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(T, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("gauss_hermite: eigensolver failed");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()[i];
        for (int it = 0; it < 2; ++it)
            x -= normed_hermite(x, n) / (std::sqrt(2.0 * n) * normed_hermite(x, n - 1));
        nodes[i] = x;
        const double f = normed_hermite(x, n - 1);
        weights[i] = 1.0 / (f * f);
    }
    // enforce the exact +/- symmetry of the rule
    for (int i = 0; i < n / 2; ++i) {
        const int j = n - 1 - i;
        const double s = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -s;
        nodes[j] = s;
        const double w = 0.5 * (weights[i] + weights[j]);
        weights[i] = weights[j] = w;
    }
    if (n % 2) nodes[n / 2] = 0.0;
    double sum = 0.0;
    for (double w : weights) sum += w;
    const double scale = std::sqrt(kPi) / sum;
    for (double& w : weights) {
        w *= scale;
        if (!std::isfinite(w)) throw Error("gauss_hermite: rule overflow; reduce node count");
    }
}

double burgers_reference(double x, double t, int nodes) {
    if (x < -1.0 || x > 1.0 || t < 0.0 || t > 1.0)
        throw Error("burgers_reference: point outside [-1,1] x [0,1]");
    if (t == 0.0) return -std::sin(kPi * x);
    if (nodes < 8) throw Error("burgers_reference: too few quadrature nodes");

    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(nodes);
    if (it == cache.end()) {
        std::vector<double> s, w;
        gauss_hermite(nodes, s, w);
        it = cache.emplace(nodes, std::make_pair(std::move(s), std::move(w))).first;
    }
    const auto& s = it->second.first;
    const auto& w = it->second.second;

    // eta = 2 sqrt(nu t) s absorbs the heat kernel into the e^{-s^2} weight.
    const double width = 2.0 * std::sqrt(kNu * t);
    double emax = -1e300;
    std::vector<double> expo(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double y = x - width * s[i];
        expo[i] = -std::cos(kPi * y) / (2.0 * kPi * kNu);
        emax = std::max(emax, expo[i]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double y = x - width * s[i];
        const double f = std::exp(expo[i] - emax);
        num -= w[i] * std::sin(kPi * y) * f;
        den += w[i] * f;
    }
    return num / den;
}

namespace {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

struct Etdrk4Coeffs {
    CVec E, E2, Q, f1, f2, f3;
};

// Contour-integral evaluation of the ETDRK4 phi-combinations
// (Kassam & Trefethen), stable for small |h L|.
Etdrk4Coeffs etdrk4_coeffs(const CVec& L, double h) {
    const int n = static_cast<int>(L.size());
    const int M = 32;
    Etdrk4Coeffs c;
    c.E.resize(n);
    c.E2.resize(n);
    c.Q.assign(n, 0.0);
    c.f1.assign(n, 0.0);
    c.f2.assign(n, 0.0);
    c.f3.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        c.E[i] = std::exp(h * L[i]);
        c.E2[i] = std::exp(h * L[i] / 2.0);
        for (int j = 0; j < M; ++j) {
            const Cplx r = std::exp(Cplx(0, kPi * (j + 0.5) / M));
            const Cplx lr = h * L[i] + r;
            const Cplx elr = std::exp(lr), elr2 = std::exp(lr / 2.0);
            c.Q[i] += (elr2 - 1.0) / lr;
            c.f1[i] += (-4.0 - lr + elr * (4.0 - 3.0 * lr + lr * lr)) / (lr * lr * lr);
            c.f2[i] += (2.0 + lr + elr * (-2.0 + lr)) / (lr * lr * lr);
            c.f3[i] += (-4.0 - 3.0 * lr - lr * lr + elr * (4.0 - lr)) / (lr * lr * lr);
        }
        c.Q[i] *= h / double(M);
        c.f1[i] *= h / double(M);
        c.f2[i] *= h / double(M);
        c.f3[i] *= h / double(M);
    }
    return c;
}

struct Fft {
    int n;
    fftw_plan fwd, bwd;
    CVec buf;

    explicit Fft(int n_) : n(n_), buf(n_) {
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    CVec forward(const CVec& in) {
        buf = in;
        fftw_execute(fwd);
        return buf;
    }
    // unnormalized inverse; caller divides by n
    CVec backward(const CVec& in) {
        buf = in;
        fftw_execute(bwd);
        return buf;
    }
};

}  // namespace

SolutionGrid spectral_reference(const std::string& problem, int modes, double dt,
                                const std::vector<double>& x_out,
                                const std::vector<double>& t_out) {
    const bool is_ac = problem == "allen-cahn";
    if (!is_ac && problem != "kdv")
        throw Error("spectral_reference: supported problems are allen-cahn and kdv");
    if (modes < 2 || (modes & (modes - 1)) != 0)
        throw Error("spectral_reference: modes must be a power of two");
    if (dt <= 0.0) throw Error("spectral_reference: dt must be positive");
    for (std::size_t i = 1; i < t_out.size(); ++i)
        if (t_out[i] <= t_out[i - 1])
            throw Error("spectral_reference: t grid must be strictly increasing");
    if (!t_out.empty() && t_out.front() < 0.0)
        throw Error("spectral_reference: negative time requested");

    // 2/3 rule: retain |j| <= modes on a 3*modes collocation grid.
    const int n = 3 * modes;
    Fft fft(n);

    std::vector<double> k(n);
    std::vector<bool> keep(n);
    for (int j = 0; j < n; ++j) {
        const int js = j <= n / 2 ? j : j - n;
        k[j] = kPi * js;  // domain length 2
        keep[j] = std::abs(js) <= modes;
    }

    CVec L(n);
    for (int j = 0; j < n; ++j)
        L[j] = is_ac ? Cplx(-1e-4 * k[j] * k[j] + 5.0, 0.0) : Cplx(0.0, 0.022 * 0.022 * k[j] * k[j] * k[j]);

    CVec u0(n);
    for (int j = 0; j < n; ++j) {
        const double x = -1.0 + 2.0 * j / n;
        u0[j] = is_ac ? x * x * std::cos(3.0 * kPi * x) + x * x : std::cos(kPi * x);
    }
    CVec v = fft.forward(u0);

    auto nonlinear = [&](const CVec& vh) {
        CVec u = fft.backward(vh);
        for (auto& c : u) c = Cplx(c.real() / n, 0.0);
        if (is_ac) {
            for (auto& c : u) c = -5.0 * c.real() * c.real() * c.real();
            CVec nh = fft.forward(u);
            for (int j = 0; j < n; ++j)
                if (!keep[j]) nh[j] = 0.0;
            return nh;
        }
        for (auto& c : u) c = c.real() * c.real();
        CVec nh = fft.forward(u);
        for (int j = 0; j < n; ++j)
            nh[j] = keep[j] ? Cplx(0.0, -0.5 * k[j]) * nh[j] : Cplx(0.0, 0.0);
        return nh;
    };

    Etdrk4Coeffs co = etdrk4_coeffs(L, dt);
    long step_count = 0;
    auto step = [&](const Etdrk4Coeffs& c) {
        CVec nv = nonlinear(v);
        CVec a(n), b(n), cc(n);
        for (int j = 0; j < n; ++j) a[j] = c.E2[j] * v[j] + c.Q[j] * nv[j];
        CVec na = nonlinear(a);
        for (int j = 0; j < n; ++j) b[j] = c.E2[j] * v[j] + c.Q[j] * na[j];
        CVec nb = nonlinear(b);
        for (int j = 0; j < n; ++j) cc[j] = c.E2[j] * a[j] + c.Q[j] * (2.0 * nb[j] - nv[j]);
        CVec nc = nonlinear(cc);
        for (int j = 0; j < n; ++j)
            v[j] = c.E[j] * v[j] + c.f1[j] * nv[j] + 2.0 * c.f2[j] * (na[j] + nb[j]) +
                   c.f3[j] * nc[j];
        ++step_count;
        if (!std::isfinite(v[0].real()) || !std::isfinite(std::abs(v[modes / 2])))
            throw Error("spectral_reference: ETDRK4 step " + std::to_string(step_count) +
                        " produced a non-finite state (" + problem + ")");
    };

    SolutionGrid grid;
    grid.problem = problem;
    grid.x_grid = x_out;
    grid.t_grid = t_out;
    grid.values.reserve(x_out.size() * t_out.size());

    auto sample = [&]() {
        for (double x : x_out) {
            Cplx s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (!keep[j]) continue;
                const int js = j <= n / 2 ? j : j - n;
                s += v[j] * std::exp(Cplx(0.0, kPi * js * (x + 1.0)));
            }
            grid.values.push_back(s.real() / n);
        }
    };

    double t_cur = 0.0;
    for (double t : t_out) {
        const double gap = t - t_cur;
        const long full = static_cast<long>(std::floor(gap / dt + 1e-9));
        for (long i = 0; i < full; ++i) step(co);
        const double rem = gap - full * dt;
        if (rem > 1e-12) step(etdrk4_coeffs(L, rem));
        t_cur = t;
        sample();
    }
    return grid;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    if (!is.read(reinterpret_cast<char*>(&v), 4)) throw Error("grid file truncated");
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v;
    if (!is.read(reinterpret_cast<char*>(&v), 8)) throw Error("grid file truncated");
    return v;
}
void get_f64s(std::istream& is, std::vector<double>& out, std::uint64_t count) {
    out.resize(count);
    if (!is.read(reinterpret_cast<char*>(out.data()), std::streamsize(count * 8)))
        throw Error("grid file truncated");
}

constexpr char kGridMagic[8] = {'T', 'I', 'N', 'N', 'G', 'R', 'I', 'D'};

}  // namespace

void save_grid(const SolutionGrid& grid, const std::string& path) {
    if (grid.values.size() != grid.x_grid.size() * grid.t_grid.size())
        throw Error("save_grid: values length does not match the grids");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("save_grid: cannot open " + path);
    os.write(kGridMagic, 8);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(grid.problem.size()));
    os.write(grid.problem.data(), std::streamsize(grid.problem.size()));
    put_u64(os, grid.x_grid.size());
    put_u64(os, grid.t_grid.size());
    os.write(reinterpret_cast<const char*>(grid.x_grid.data()),
             std::streamsize(grid.x_grid.size() * 8));
    os.write(reinterpret_cast<const char*>(grid.t_grid.data()),
             std::streamsize(grid.t_grid.size() * 8));
    os.write(reinterpret_cast<const char*>(grid.values.data()),
             std::streamsize(grid.values.size() * 8));
    if (!os) throw Error("save_grid: write failed for " + path);
}

SolutionGrid load_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("load_grid: cannot open " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kGridMagic, 8) != 0)
        throw Error("load_grid: " + path + " is not a TINNGRID file");
    const std::uint32_t version = get_u32(is);
    if (version != 1)
        throw Error("load_grid: unsupported version " + std::to_string(version));
    SolutionGrid grid;
    const std::uint32_t name_len = get_u32(is);
    grid.problem.resize(name_len);
    if (name_len && !is.read(grid.problem.data(), name_len)) throw Error("grid file truncated");
    const std::uint64_t nx = get_u64(is), nt = get_u64(is);
    get_f64s(is, grid.x_grid, nx);
    get_f64s(is, grid.t_grid, nt);
    get_f64s(is, grid.values, nx * nt);
    return grid;
}

void dump_csv(const SolutionGrid& grid, std::ostream& os) {
    os << "x,t,value\n";
    for (std::size_t it = 0; it < grid.t_grid.size(); ++it)
        for (std::size_t ix = 0; ix < grid.x_grid.size(); ++ix)
            os << fmt_double(grid.x_grid[ix]) << ',' << fmt_double(grid.t_grid[it]) << ','
               << fmt_double(grid.at(it, ix)) << '\n';
}

}  // namespace tinn
