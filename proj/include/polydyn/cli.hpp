#ifndef POLYDYN_CLI_HPP
#define POLYDYN_CLI_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polydyn/chebyshev_lift.hpp"
#include "polydyn/components.hpp"
#include "polydyn/cubic_family.hpp"
#include "polydyn/error.hpp"
#include "polydyn/escape.hpp"
#include "polydyn/lowerbound.hpp"
#include "polydyn/polynomial.hpp"
#include "polydyn/pressure.hpp"

namespace polydyn::cli {

/// Invalid flag, config key or value. Exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Round-trip formatting (17 significant digits).
inline std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

inline std::string num(Complex z) {
    const double im = z.imag() + 0.0;
    return num(z.real() + 0.0) + (im < 0.0 ? "" : "+") + num(im) + "i";
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

/// "re,im" or "a+bi" / "a-bi" / "a".
inline Complex parse_complex(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() == 2) return {parse_double(parts[0]), parse_double(parts[1])};
    if (parts.size() != 1 || s.empty()) throw ConfigError("bad complex number: '" + s + "'");
    if (s.back() != 'i') return {parse_double(s), 0.0};
    for (std::size_t k = s.size() - 1; k-- > 1;)
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E')
            return {parse_double(s.substr(0, k)), parse_double(s.substr(k, s.size() - k - 1))};
    return {0.0, parse_double(s.substr(0, s.size() - 1))};
}

/// "v", "v1,v2,..." or "lo:hi:step".
inline std::vector<double> parse_values(const std::string& s) {
    const auto range = split(s, ':');
    if (range.size() == 3) {
        const double lo = parse_double(range[0]), hi = parse_double(range[1]), step = parse_double(range[2]);
        if (!(step > 0.0) || hi < lo) throw ConfigError("bad range: '" + s + "'");
        std::vector<double> out;
        const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) out.push_back(lo + step * i);
        return out;
    }
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
    if (out.empty()) throw ConfigError("empty value list");
    return out;
}

inline Box parse_box(const std::string& s) {
    const auto v = parse_values(s);
    if (v.size() != 4 || !(v[1] > v[0]) || !(v[3] > v[2])) throw ConfigError("box must be xmin,xmax,ymin,ymax with positive area");
    return {v[0], v[1], v[2], v[3]};
}

/// Polynomial shorthand:
///   power:d        z^d
///   cheb2          z^2 - 2
///   cubic:e:b      e z^3 + z^2 - b
///   cubic:e        same with b = beta(e) on the curve f^2(0) = p
///   figure1:a      a z^3 + z^2 - b with 0 of period 2
///   coeffs:c0,c1,...  ascending powers, entries real or a+bi
struct PolySpec {
    std::string text;
    std::string kind;
    Polynomial p{0.0, 1.0};
    double eps = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
};

inline PolySpec parse_poly(const std::string& text) {
    PolySpec spec;
    spec.text = text;
    const auto parts = split(text, ':');
    spec.kind = parts.empty() ? "" : parts[0];
    if (spec.kind == "power" && parts.size() == 2) {
        const double d = parse_double(parts[1]);
        if (d < 2 || d != std::floor(d) || d > 64) throw ConfigError("power degree must be an integer in [2, 64]");
        spec.p = Polynomial::monomial(static_cast<int>(d));
    } else if (spec.kind == "cheb2" && parts.size() == 1) {
        spec.p = Polynomial{-2.0, 0.0, 1.0};
        spec.eps = 0.0;
        spec.beta = 2.0;
    } else if (spec.kind == "cubic" && (parts.size() == 2 || parts.size() == 3)) {
        spec.eps = parse_double(parts[1]);
        spec.beta = parts.size() == 3 ? parse_double(parts[2]) : gamma_solve(spec.eps).beta;
        spec.p = cubic_map(spec.eps, spec.beta);
    } else if (spec.kind == "figure1" && parts.size() == 2) {
        const auto fp = figure1_parameters(parse_double(parts[1]));
        spec.eps = fp.a;
        spec.beta = fp.b;
        spec.p = cubic_map(fp.a, fp.b);
    } else if (spec.kind == "coeffs" && parts.size() == 2) {
        std::vector<Complex> c;
        for (const auto& entry : split(parts[1], ',')) c.push_back(parse_complex(entry));
        try {
            spec.p = Polynomial(std::move(c));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("unknown polynomial spec '" + text + "'");
    }
    if (spec.p.degree() < 2) throw ConfigError("polynomial degree must be at least 2");
    return spec;
}

/// Output stream for one command: --out file or the caller's stream.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback, bool binary = false) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
            if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

namespace detail {

/// Options that do not change results and are left out of the echo.
inline bool echo_excluded(const std::string& name) {
    return name == "help" || name == "config" || name == "threads" || name == "out" || name == "sidecar";
}

inline std::vector<std::pair<std::string, std::string>> effective_config(const CLI::App& sub) {
    std::vector<std::pair<std::string, std::string>> out{{"command", sub.get_name()}};
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (echo_excluded(name)) continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
        } else {
            value = opt->get_default_str();
        }
        if (opt->get_expected_min() == 0 && value.empty()) value = "false";
        out.emplace_back(name, value);
    }
    return out;
}

inline void echo(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& cfg,
                 const std::string& prefix = "# ") {
    for (const auto& [k, v] : cfg) os << prefix << k << ": " << v << "\n";
}

/// key=value lines; blank lines and lines starting with # are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

inline Complex default_base(const PolySpec& spec) { return spec.kind == "power" ? Complex(1.0, 0.0) : Complex(1.0, 0.5); }

inline Box default_box(const PolySpec& spec, double radius) {
    if (spec.kind == "figure1") return figure1_frame().box;
    return {-radius, radius, -radius, radius};
}

inline std::pair<int, int> parse_resolution(const std::string& s) {
    const auto parts = split(s, 'x');
    const auto as_int = [](const std::string& t) {
        const double v = parse_double(t);
        if (v < 1 || v != std::floor(v) || v > 16384) throw ConfigError("resolution must be an integer in [1, 16384]");
        return static_cast<int>(v);
    };
    if (parts.size() == 1) return {as_int(parts[0]), as_int(parts[0])};
    if (parts.size() == 2) return {as_int(parts[0]), as_int(parts[1])};
    throw ConfigError("resolution must be W or WxH");
}

inline TreeOptions tree_options(const std::string& precision, int threads) {
    TreeOptions opt;
    opt.threads = threads;
    if (precision == "dd") opt.precision = Precision::DoubleDouble;
    else if (precision != "double") throw ConfigError("precision must be 'double' or 'dd'");
    return opt;
}

inline std::string flags(const PressureEstimate& est) { return est.near_critical ? "near_critical" : "ok"; }

} // namespace detail

/// Values bound to flags; one instance per run.
struct RunConfig {
    std::vector<std::string> polys; ///< empty means cheb2
    std::string out;
    std::string sidecar;
    std::string precision = "double";
    int threads = 0;

    // grids
    std::string box;
    std::string resolution = "512";
    int max_iter = 256;
    int level = 8;
    double half_width = 5.0;
    std::string seed = "0,0";
    int chain_depth = 10;
    int m_cap = 12;
    bool report = false;

    // pressure
    std::string t_values = "0,0.5,1,1.5";
    std::string x;
    int N = 10;
    double t_lo = 0.5;
    double t_hi = 2.0;
    double tol_t = 1e-3;
    std::string bowen;
    int pressure_depth = 10;

    // lift
    int samples = 50;
    int n_max = 8;

    // family
    std::string eps = "0:0.1:0.005";
    bool gradients = false;

    // lowerbound
    int c0_samples = 24;
    int lambda_samples = 8;
};

namespace detail {

inline std::vector<std::string> poly_list(const RunConfig& rc) {
    return rc.polys.empty() ? std::vector<std::string>{"cheb2"} : rc.polys;
}

inline std::string single_poly(const RunConfig& rc) {
    if (rc.polys.size() > 1) throw ConfigError("this command takes a single --poly");
    return poly_list(rc).front();
}

inline std::pair<double, double> parse_bracket(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw ConfigError("bracket must be lo:hi");
    const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
    if (!(hi > lo)) throw ConfigError("bracket must have lo < hi");
    return {lo, hi};
}

inline int cmd_render(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    const PolySpec spec = parse_poly(single_poly(rc));
    const DynSetup setup(spec.p, rc.max_iter);
    const auto [w, h] = parse_resolution(rc.resolution);
    const Frame frame(rc.box.empty() ? default_box(spec, setup.radius) : parse_box(rc.box), w, h);
    const RasterImage img = render(setup, frame, rc.threads);
    {
        Output o(rc.out, out, true);
        std::ostringstream header;
        header << "P5\n";
        echo(header, effective_config(sub));
        header << frame.width << ' ' << frame.height << "\n255\n";
        *o << header.str();
        (*o).write(reinterpret_cast<const char*>(img.values.data()), static_cast<std::streamsize>(img.values.size()));
    }
    if (rc.report) {
        // report goes to the caller's stream; the image must then go to --out
        if (rc.out.empty()) throw ConfigError("--report needs --out for the image");
        echo(out, effective_config(sub));
        const auto escape = polydyn::detail::escape_levels(setup, frame, rc.max_iter, rc.threads);
        const LevelGrid components = polydyn::detail::label_level(escape, rc.max_iter, frame, {});
        const LevelGrid lg = level_grid(setup, rc.level, frame, rc.threads);
        out << "radius: " << num(setup.radius) << "\n";
        if (spec.kind == "figure1") {
            out << "a: " << num(spec.eps) << "\nb: " << num(spec.beta) << "\n";
            out << "period2_residual: " << num(std::abs(spec.p(spec.p(Complex(0.0))))) << "\n";
        }
        std::size_t bounded_pixels = 0;
        for (const auto e : escape) bounded_pixels += e > rc.max_iter;
        out << "bounded_pixels: " << bounded_pixels << "\n";
        out << "bounded_components: " << components.component_count() << "\n";
        out << "level: " << rc.level << "\nlevel_grid_labels: " << lg.component_count() << "\n";
    }
    return 0;
}

inline int cmd_components(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    const PolySpec spec = parse_poly(single_poly(rc));
    const DynSetup setup(spec.p);
    const auto [w, h] = parse_resolution(rc.resolution);
    const Frame frame(rc.box.empty() ? default_box(spec, setup.radius) : parse_box(rc.box), w, h);
    const LevelGrid g = level_grid(setup, rc.level, frame, rc.threads);
    if (!rc.out.empty()) {
        Output o(rc.out, out, true);
        std::ostringstream header;
        header << "P5\n";
        echo(header, effective_config(sub));
        header << frame.width << ' ' << frame.height << "\n255\n";
        *o << header.str();
        const auto bytes = clamped_labels(g);
        (*o).write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    Output side(rc.sidecar, out);
    echo(*side, effective_config(sub));
    write_sidecar(*side, g);
    return 0;
}

inline int cmd_pressure(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    if (rc.N < 1) throw ConfigError("N must be at least 1");
    if (!rc.x.empty() && poly_list(rc).size() > 1) throw ConfigError("--x applies to a single --poly");
    const auto ts = parse_values(rc.t_values);
    std::vector<PolySpec> specs;
    for (const auto& text : poly_list(rc)) specs.push_back(parse_poly(text));
    const bool bowen = !rc.bowen.empty();
    const auto [t_lo, t_hi] = bowen ? parse_bracket(rc.bowen) : std::pair<double, double>{0.0, 1.0};
    Output o(rc.out, out);
    echo(*o, effective_config(sub));
    *o << "t,n,P_n,increment,leaves,flags\n";
    for (const auto& spec : specs) {
        const Complex x = rc.x.empty() ? default_base(spec) : parse_complex(rc.x);
        validate_base_point(spec.p, x, rc.N);
        const PreimageTree tree = preimage_tree(spec.p, x, rc.N, tree_options(rc.precision, rc.threads));
        *o << "# poly: " << spec.text << "\n# base: " << num(x) << "\n";
        for (const double t : ts) {
            const PressureEstimate est = pressure_from_tree(tree, t);
            for (int n = 1; n <= est.depth(); ++n) {
                const auto i = static_cast<std::size_t>(n - 1);
                *o << num(t) << ',' << n << ',' << num(est.rates[i]) << ',' << num(est.increments[i]) << ','
                   << num(est.leaves[i]) << ',' << flags(est) << "\n";
            }
            *o << "# t: " << num(t) << " extrapolated: " << num(est.value) << " dispersion: " << num(est.dispersion)
               << " rate_mean: " << num(est.rate_value) << "\n";
        }
        if (bowen) {
            const BowenZero z = bowen_zero(tree, t_lo, t_hi, rc.tol_t);
            *o << "# bowen_zero: " << num(z.t) << " bracket: " << num(z.lo) << ' ' << num(z.hi) << "\n";
        }
    }
    return 0;
}

inline int cmd_dimension(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    const PolySpec spec = parse_poly(single_poly(rc));
    const Complex x = rc.x.empty() ? default_base(spec) : parse_complex(rc.x);
    if (rc.N < 1) throw ConfigError("N must be at least 1");
    const BowenZero z = bowen_zero(spec.p, x, rc.N, rc.t_lo, rc.t_hi, rc.tol_t, tree_options(rc.precision, rc.threads));
    Output o(rc.out, out);
    echo(*o, effective_config(sub));
    *o << "t_star,bracket_lo,bracket_hi,N,notes\n";
    *o << num(z.t) << ',' << num(z.lo) << ',' << num(z.hi) << ',' << z.depth << ','
       << "bisection on the mean of the last 3 increments of log S_n at base " << num(x) << "\n";
    return 0;
}

inline int cmd_verify_lift(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    const PolySpec spec = parse_poly(single_poly(rc));
    if (spec.kind != "cheb2") throw ConfigError("verify-lift supports --poly cheb2");
    if (rc.samples < 1 || rc.n_max < 1) throw ConfigError("samples and n-max must be positive");
    const LiftedSystem sys = chebyshev_quadratic_system();
    Output o(rc.out, out);
    echo(*o, effective_config(sub));
    *o << "x_re,x_im,n,lhs,rhs,relerr\n";
    double worst = 0.0;
    // Halton points in [-1.9, 1.9] x [0.05, 1.0], n cycling through 1..n_max
    const auto halton = [](int index, int base) {
        double f = 1.0, r = 0.0;
        while (index > 0) {
            f /= base;
            r += f * (index % base);
            index /= base;
        }
        return r;
    };
    for (int i = 0; i < rc.samples; ++i) {
        const Complex x(-1.9 + 3.8 * halton(i + 1, 2), 0.05 + 0.95 * halton(i + 1, 3));
        const int n = 1 + i % rc.n_max;
        const TransferCheck c = verify_transfer_identity(sys, x, n);
        worst = std::max(worst, c.relative_error);
        *o << num(x.real()) << ',' << num(x.imag()) << ',' << n << ',' << num(c.lhs) << ',' << num(c.rhs) << ','
           << num(c.relative_error) << "\n";
    }
    double circle_error = 0.0;
    for (int j = 0; j < 16; ++j)
        for (int n = 1; n <= rc.n_max; ++n) {
            const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.25) / 16.0);
            circle_error = std::max(circle_error, std::abs(circle_sum(sys, w, n) - 1.0));
        }
    *o << "# max_relerr: " << num(worst) << "\n";
    *o << "# circle_sum_max_error: " << num(circle_error) << "\n";
    *o << "# semiconjugacy_error: " << num(semiconjugacy_error(sys)) << "\n";
    return 0;
}

inline int cmd_curve(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    Output o(rc.out, out);
    echo(*o, effective_config(sub));
    if (rc.gradients) {
        const Gradient g = gamma_gradient(0.0, 2.0);
        const Gradient p = fixed_point_gradient(0.0, 2.0);
        *o << "point: 0,2\n";
        *o << "grad_gamma: " << num(g.d_eps) << ',' << num(g.d_beta) << "\n";
        *o << "grad_p: " << num(p.d_eps) << ',' << num(p.d_beta) << "\n";
        *o << "slope_dbeta_deps: " << num(curve_slope(0.0, 2.0)) << "\n";
        return 0;
    }
    const auto values = parse_values(rc.eps);
    std::vector<FamilyPoint> pts;
    if (split(rc.eps, ':').size() == 3) {
        const auto r = split(rc.eps, ':');
        pts = curve(parse_double(r[0]), parse_double(r[1]), parse_double(r[2]));
    } else {
        for (const double e : values) pts.push_back(gamma_solve(e));
    }
    *o << "eps,beta,p,residual\n";
    for (const auto& fp : pts) *o << num(fp.eps) << ',' << num(fp.beta) << ',' << num(fp.p) << ',' << num(fp.residual) << "\n";
    *o << "# dbeta_deps_at_first: " << num(curve_slope(pts.front().eps, pts.front().beta)) << "\n";
    return 0;
}

inline int cmd_verify_example(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    const auto values = parse_values(rc.eps);
    ExampleOptions opt;
    opt.half_width = rc.half_width;
    opt.resolution = parse_resolution(rc.resolution).first;
    opt.level = rc.level;
    opt.m_cap = rc.m_cap;
    opt.threads = rc.threads;
    Output o(rc.out, out);
    echo(*o, effective_config(sub));
    bool all = true;
    for (const double eps : values) {
        const ExampleReport rep = verify_example(eps, opt);
        *o << "eps: " << num(eps) << "\nbeta: " << num(rep.point.beta) << "\np: " << num(rep.point.p)
           << "\nradius: " << num(rep.radius) << "\n";
        for (const auto& c : rep.checks) {
            *o << "check_" << c.id << ": " << to_string(c.status) << " | " << c.description;
            for (const auto& [k, v] : c.measured) *o << " | " << k << "=" << num(v);
            if (!c.note.empty()) *o << " | " << c.note;
            *o << "\n";
        }
        *o << "hausdorff_pitches:";
        for (const double d : rep.hausdorff_pitches) *o << ' ' << (d < 0 ? std::string("clipped") : num(d));
        *o << "\nverdict: " << (rep.all_pass() ? "all-pass" : "FAIL") << "\n";
        all = all && rep.all_pass();
    }
    if (!all) throw Error("CheckFailed", "at least one check of verify-example failed");
    return 0;
}

inline void lowerbound_section(const RunConfig& rc, const PolySpec& spec, std::ostream& os) {
    const DynSetup setup(spec.p);
    const auto [w, h] = parse_resolution(rc.resolution);
    if (w != h) throw ConfigError("lowerbound uses a square frame");
    const Frame frame = Frame::real_axis_aligned(rc.half_width, w);
    const ComponentChain chain = component_chain(setup, parse_complex(rc.seed), rc.chain_depth, frame, rc.threads);
    const PolyLikeRestriction F = find_poly_like(setup, chain, 1, rc.m_cap);
    const TreeOptions topt = tree_options(rc.precision, rc.threads);
    if (rc.c0_samples < 20) throw ConfigError("c0-samples must be at least 20");
    if (rc.n_max < 1) throw ConfigError("n-max must be positive");

    std::ostream* const o = &os;
    const auto conn = connectivity_class(setup);
    *o << "poly: " << spec.text << "\n";
    *o << "connectivity: " << to_string(conn.kind) << "\n";
    *o << "poly_like_level: " << F.level << "\npoly_like_degree: " << F.degree << "\n";

    {
        const Complex x = rc.x.empty() ? default_base(spec) : parse_complex(rc.x);
        validate_base_point(spec.p, x, rc.pressure_depth);
        const PreimageTree tree = preimage_tree(spec.p, x, rc.pressure_depth, topt);
        const PressureEstimate est = pressure_from_tree(tree, 1.0);
        *o << "pressure_base: " << num(x) << "\npressure_depth: " << rc.pressure_depth << "\n";
        for (int n = 1; n <= est.depth(); ++n) {
            const auto i = static_cast<std::size_t>(n - 1);
            *o << "P_" << n << "(1): rate " << num(est.rates[i]) << " increment " << num(est.increments[i]) << "\n";
        }
        *o << "pressure_at_1: " << num(est.value) << "\npressure_at_1_dispersion: " << num(est.dispersion) << "\n";
        const BowenZero z = bowen_zero(tree, rc.t_lo, rc.t_hi, rc.tol_t);
        *o << "bowen_zero: " << num(z.t) << "\nbowen_bracket: " << num(z.lo) << ' ' << num(z.hi) << "\n";
    }
    const auto samples = sample_outer_domain(chain, F, static_cast<std::size_t>(rc.c0_samples));
    const auto doubled = sample_outer_domain(chain, F, static_cast<std::size_t>(2 * rc.c0_samples));
    const C0Estimate c0 = estimate_C0(setup, F, samples, rc.n_max, topt);
    const C0Estimate c0d = estimate_C0(setup, F, doubled, rc.n_max, topt);
    const auto min_upto = [](const C0Estimate& e, int n) {
        double m = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= n && k <= static_cast<int>(e.min_by_n.size()); ++k)
            m = std::min(m, e.min_by_n[static_cast<std::size_t>(k - 1)]);
        return m;
    };
    *o << "samples: " << samples.size() << "\n";
    *o << "min_L_by_n:";
    for (const double m : c0.min_by_n) *o << ' ' << num(m);
    *o << "\n";
    const int n_small = std::min(8, rc.n_max);
    *o << "min_L_upto_" << n_small << ": " << num(min_upto(c0, n_small)) << "\n";
    *o << "min_L_upto_" << rc.n_max << ": " << num(min_upto(c0, rc.n_max)) << "\n";
    *o << "C0: " << num(c0.C0) << "\nC0_argmin_x: " << num(c0.argmin_x) << "\nC0_argmin_n: " << c0.argmin_n << "\n";
    *o << "C0_doubled_samples: " << num(c0d.C0) << "\n";

    if (conn.kind != Connectivity::Disconnected) {
        *o << "v_branch: not applicable (" << to_string(conn.kind) << " Julia set)\n";
        *o << "verdict: no lower-bound certificate for this map\n";
        return;
    }
    const VBranch V = find_V_branch(setup, chain, F);
    const ComponentInfo& vi = V.info;
    *o << "V_level: " << V.level << "\nV_label: " << V.label << "\nV_pixels: " << vi.pixels << "\n";
    *o << "V_box: " << num(frame.center(vi.col_min, vi.row_max)) << ' ' << num(frame.center(vi.col_max, vi.row_min)) << "\n";
    *o << "V_degree: " << V.degree << "\nV_meets_filled_julia: " << (V.meets_filled_julia ? "yes" : "no") << "\n";

    const BranchSystem sys{&setup, F, V};
    const AMeasure a = measure_a(sys, samples, rc.threads);
    const AMeasure ad = measure_a(sys, doubled, rc.threads);
    *o << "a: " << num(a.a) << "\na_argmin_x: " << num(a.argmin) << "\na_doubled_samples: " << num(ad.a) << "\n";
    const auto variation = [](double u, double v) { return std::abs(u - v) / std::max(std::abs(u), 1e-300); };
    *o << "a_variation: " << num(variation(a.a, ad.a)) << "\nC0_variation: " << num(variation(c0.C0, c0d.C0)) << "\n";

    const std::vector<Complex> lambda_xs(samples.begin(),
                                         samples.begin() + std::min<std::ptrdiff_t>(rc.lambda_samples,
                                                                                     static_cast<std::ptrdiff_t>(samples.size())));
    const PressureLowerBound lb = pressure_one_lower_bound(sys, a, lambda_xs, rc.N, c0.C0, rc.threads);
    *o << "b: " << num(lb.b) << "\nab: " << num(lb.a * lb.b) << "\n";
    *o << "lambda_table: x,N,Lambda_N,bound,certified\n";
    for (const auto& rec : lb.records)
        *o << "lambda: " << num(rec.x) << ',' << rec.N << ',' << num(rec.lambda) << ',' << num(rec.bound) << ','
           << (rec.certificate ? "yes" : "no") << "\n";
    const LambdaRecord& first = lb.records.front();
    *o << "per_N_at: " << num(first.x) << "\n";
    for (int n = 1; n <= rc.N; ++n) {
        const LambdaRecord r = lambda_N(sys, first.x, n, first.a, lb.b, false, rc.threads);
        *o << "Lambda_" << n << ": " << num(r.lambda) << " bound: " << num(r.bound) << "\n";
    }
    *o << "min_rate: " << num(lb.min_rate) << "\n";
    *o << "log_1_plus_ab: " << num(lb.asymptote) << "\n";
    *o << "per_f_step_bound: " << num(lb.f_time_bound) << "\n";
    *o << "verdict: " << (lb.asymptote > 0.0 && lb.all_certified ? "numerical evidence that P(1,f) > 0, hence t* > 1"
                                                                 : "no evidence")
       << " (sampled infima; not a proof)\n";
}

inline int cmd_lowerbound(const RunConfig& rc, const CLI::App& sub, std::ostream& out) {
    if (!rc.x.empty() && poly_list(rc).size() > 1) throw ConfigError("--x applies to a single --poly");
    if (rc.pressure_depth < 1) throw ConfigError("pressure-depth must be positive");
    std::vector<PolySpec> specs;
    for (const auto& text : poly_list(rc)) specs.push_back(parse_poly(text));
    Output o(rc.out, out);
    echo(*o, effective_config(sub));
    for (const auto& spec : specs) lowerbound_section(rc, spec, *o);
    return 0;
}

} // namespace detail

/// Entry point. Exit codes: 0 success, 1 computational error (error name on
/// `err`), 2 configuration error.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig rc;
    CLI::App app{"Geometric pressure and component toolkit for polynomial Julia sets", "polydyn"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    std::string config_path;

    const auto common = [&](CLI::App* s) {
        s->add_option("--poly", rc.polys, "power:d | cheb2 | cubic:eps[:beta] | figure1:a | coeffs:c0,c1,...")
            ->default_str("cheb2");
        s->add_option("--config", config_path, "key=value file; flags take precedence");
        s->add_option("--threads", rc.threads, "worker threads (0 = POLYDYN_THREADS or hardware)");
        s->add_option("--out", rc.out, "output file (default: stdout)");
        s->add_option("--precision", rc.precision, "double | dd");
    };
    const auto grid = [&](CLI::App* s) {
        s->add_option("--box", rc.box, "xmin,xmax,ymin,ymax");
        s->add_option("--res", rc.resolution, "W or WxH");
    };

    auto* render_cmd = app.add_subcommand("render", "escape-time image (PGM)");
    common(render_cmd);
    grid(render_cmd);
    render_cmd->add_option("--max-iter", rc.max_iter);
    render_cmd->add_option("--level", rc.level, "level for the label count in --report");
    render_cmd->add_flag("--report", rc.report, "print component counts (image goes to --out)");

    auto* comp_cmd = app.add_subcommand("components", "labelled components of f^{-n}(D(0,R))");
    common(comp_cmd);
    grid(comp_cmd);
    comp_cmd->add_option("--level", rc.level);
    comp_cmd->add_option("--sidecar", rc.sidecar, "component records (default: stdout)");

    auto* pres_cmd = app.add_subcommand("pressure", "pressure sequence CSV");
    common(pres_cmd);
    pres_cmd->add_option("--t", rc.t_values, "t values: v | v1,v2 | lo:hi:step");
    pres_cmd->add_option("--x", rc.x, "base point re,im");
    pres_cmd->add_option("--N", rc.N, "depth");
    pres_cmd->add_option("--bowen", rc.bowen, "lo:hi; also report the first zero in this bracket");
    pres_cmd->add_option("--tol-t", rc.tol_t);

    auto* dim_cmd = app.add_subcommand("dimension", "first zero of the pressure");
    common(dim_cmd);
    dim_cmd->add_option("--x", rc.x);
    dim_cmd->add_option("--N", rc.N);
    dim_cmd->add_option("--t-lo", rc.t_lo);
    dim_cmd->add_option("--t-hi", rc.t_hi);
    dim_cmd->add_option("--tol-t", rc.tol_t);

    auto* lift_cmd = app.add_subcommand("verify-lift", "transfer identity through the Zhukovsky lift");
    common(lift_cmd);
    lift_cmd->add_option("--samples", rc.samples);
    lift_cmd->add_option("--n-max", rc.n_max);

    auto* curve_cmd = app.add_subcommand("curve", "beta(eps) on the curve f^2(0) = p");
    common(curve_cmd);
    curve_cmd->add_option("--eps", rc.eps, "lo:hi:step or list");
    curve_cmd->add_flag("--gradients", rc.gradients, "finite-difference gradients at (0,2)");

    auto* ex_cmd = app.add_subcommand("verify-example", "structural checks for the cubic family");
    common(ex_cmd);
    ex_cmd->add_option("--eps", rc.eps, "list of eps");
    ex_cmd->add_option("--res", rc.resolution);
    ex_cmd->add_option("--half-width", rc.half_width);
    ex_cmd->add_option("--level", rc.level);
    ex_cmd->add_option("--m-cap", rc.m_cap);

    auto* lb_cmd = app.add_subcommand("lowerbound", "free branch system and Lambda_N report");
    common(lb_cmd);
    lb_cmd->add_option("--res", rc.resolution);
    lb_cmd->add_option("--half-width", rc.half_width);
    lb_cmd->add_option("--seed", rc.seed);
    lb_cmd->add_option("--chain-depth", rc.chain_depth);
    lb_cmd->add_option("--m-cap", rc.m_cap);
    lb_cmd->add_option("--N", rc.N);
    lb_cmd->add_option("--n-max", rc.n_max, "depth for C0");
    lb_cmd->add_option("--c0-samples", rc.c0_samples);
    lb_cmd->add_option("--lambda-samples", rc.lambda_samples);
    lb_cmd->add_option("--x", rc.x, "base point for the pressure section");
    lb_cmd->add_option("--pressure-depth", rc.pressure_depth);
    lb_cmd->add_option("--t-lo", rc.t_lo);
    lb_cmd->add_option("--t-hi", rc.t_hi);
    lb_cmd->add_option("--tol-t", rc.tol_t);

    // per-command defaults that differ from the shared RunConfig defaults
    const std::map<std::string, std::vector<std::pair<std::string, std::string>>> command_defaults{
        {"verify-example", {{"--eps", "0.05"}, {"--res", "2048"}, {"--level", "10"}}},
        {"lowerbound", {{"--poly", "cubic:0.05"}, {"--res", "2048"}, {"--N", "8"}, {"--n-max", "12"}}},
        {"render", {{"--res", "512"}}},
        {"components", {{"--res", "512"}}},
    };

    try {
        std::vector<std::string> argv(args.begin(), args.end());
        // expand --config into flags placed before the user's own flags
        std::string cmd = argv.empty() ? "" : argv.front();
        std::vector<std::string> expanded;
        if (!argv.empty()) expanded.push_back(cmd);
        CLI::App* sub = nullptr;
        for (auto* s : app.get_subcommands({})) if (s->get_name() == cmd) sub = s;
        const auto user_has = [&](const std::string& flag) {
            for (std::size_t i = 1; i < argv.size(); ++i)
                if (argv[i] == flag || argv[i].rfind(flag + "=", 0) == 0) return true;
            return false;
        };
        if (sub) {
            if (auto it = command_defaults.find(cmd); it != command_defaults.end())
                for (const auto& [flag, value] : it->second)
                    if (!user_has(flag)) {
                        CLI::Option* opt = sub->get_option_no_throw(flag);
                        if (opt) opt->default_str(value);
                        expanded.push_back(flag + "=" + value);
                    }
            for (std::size_t i = 1; i < argv.size(); ++i) {
                std::string path;
                if (argv[i] == "--config" && i + 1 < argv.size()) path = argv[i + 1];
                else if (argv[i].rfind("--config=", 0) == 0) path = argv[i].substr(9);
                if (path.empty()) continue;
                for (const auto& [key, value] : detail::read_config(path)) {
                    const std::string flag = "--" + key;
                    const CLI::Option* opt = sub->get_option_no_throw(flag);
                    if (!opt || key == "config") throw ConfigError("unknown config key '" + key + "'");
                    if (user_has(flag)) continue;
                    if (opt->get_type_size() == 0) {
                        if (value == "true" || value == "1") expanded.push_back(flag);
                        else if (value != "false" && value != "0") throw ConfigError("flag '" + key + "' takes true/false");
                    } else {
                        expanded.push_back(flag + "=" + value);
                    }
                }
            }
        }
        for (std::size_t i = 1; i < argv.size(); ++i) expanded.push_back(argv[i]);
        for (auto* s : app.get_subcommands({}))
            for (auto* opt : s->get_options({}))
                if (opt->get_single_name() != "poly") opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
        CLI::App* chosen = app.get_subcommands().front();
        if (rc.threads < 0) throw ConfigError("threads must be non-negative");
        if (rc.max_iter < 1 || rc.max_iter > 30000) throw ConfigError("max-iter must be in [1, 30000]");
        if (rc.level < 0 || rc.level > 30000) throw ConfigError("level must be in [0, 30000]");
        const std::string name = chosen->get_name();
        if (name == "render") return detail::cmd_render(rc, *chosen, out);
        if (name == "components") return detail::cmd_components(rc, *chosen, out);
        if (name == "pressure") return detail::cmd_pressure(rc, *chosen, out);
        if (name == "dimension") return detail::cmd_dimension(rc, *chosen, out);
        if (name == "verify-lift") return detail::cmd_verify_lift(rc, *chosen, out);
        if (name == "curve") return detail::cmd_curve(rc, *chosen, out);
        if (name == "verify-example") return detail::cmd_verify_example(rc, *chosen, out);
        if (name == "lowerbound") return detail::cmd_lowerbound(rc, *chosen, out);
        throw ConfigError("unknown subcommand");
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "ConfigError: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "ConfigError: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "ConfigError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "InternalError\n" << e.what() << "\n";
        return 1;
    }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace polydyn::cli

#endif // POLYDYN_CLI_HPP
