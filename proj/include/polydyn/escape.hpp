#ifndef POLYDYN_ESCAPE_HPP
#define POLYDYN_ESCAPE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polydyn/error.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/polynomial.hpp"

namespace polydyn {

/// Boundary samples used to witness |p(z)| >= 2R on |z| = R.
inline constexpr int kWitnessSamples = 4096;

/// Returns false if some sample on |z| = R has |p(z)| < 2R.
inline bool escape_witness(const Polynomial& p, double radius, int samples = kWitnessSamples) {
    for (int k = 0; k < samples; ++k) {
        const Complex z = std::polar(radius, 2.0 * std::numbers::pi * k / samples);
        // relative slack only absorbs rounding in the equality case (z^d at R = 2)
        if (std::abs(p(z)) < 2.0 * radius * (1.0 - 1e-12)) return false;
    }
    return true;
}

/// R = max(1, (2 + sum_{i<d} |a_i|) / |a_d|). For |z| >= R this gives
/// |p(z)| >= 2|z|, so the closure of p^{-1}(D(0,R)) lies in D(0,R) and the
/// filled Julia set is inside D(0,R).
inline double escape_radius(const Polynomial& p) {
    if (p.degree() < 2) throw std::invalid_argument("escape_radius: degree must be at least 2");
    double lower = 0.0;
    for (int i = 0; i < p.degree(); ++i) lower += std::abs(p[i]);
    const double r = std::max(1.0, (2.0 + lower) / std::abs(p.leading()));
    if (!escape_witness(p, r))
        throw WitnessFailed("boundary sample with |p(z)| < 2R at R = " + std::to_string(r));
    return r;
}

/// Polynomial plus verified escape radius and orbit budget.
struct DynSetup {
    Polynomial p;
    double radius;
    int max_iter;

    explicit DynSetup(Polynomial poly, int max_iterations = 1000)
        : p(std::move(poly)), radius(escape_radius(p)), max_iter(max_iterations) {}
};

struct OrbitClass {
    enum class Kind { Escaped, Bounded };
    Kind kind;
    int steps; ///< first k with |f^k(z)| > R for Escaped; the budget for Bounded

    bool escaped() const { return kind == Kind::Escaped; }
    bool bounded() const { return kind == Kind::Bounded; }

    friend bool operator==(const OrbitClass&, const OrbitClass&) = default;
};

inline OrbitClass classify(const Polynomial& p, double radius, Complex z, int max_iter) {
    if (std::abs(z) > radius) return {OrbitClass::Kind::Escaped, 0};
    for (int k = 1; k <= max_iter; ++k) {
        z = p(z);
        if (!(std::abs(z) <= radius)) return {OrbitClass::Kind::Escaped, k};
    }
    return {OrbitClass::Kind::Bounded, max_iter};
}

inline OrbitClass classify(const DynSetup& setup, Complex z) {
    return classify(setup.p, setup.radius, z, setup.max_iter);
}

enum class Connectivity { Connected, Disconnected, TotallyDisconnected };

inline const char* to_string(Connectivity c) {
    switch (c) {
    case Connectivity::Connected: return "Connected";
    case Connectivity::Disconnected: return "Disconnected";
    case Connectivity::TotallyDisconnected: return "TotallyDisconnected";
    }
    return "?";
}

struct CriticalOrbit {
    Root critical_point;
    OrbitClass orbit;
    /// The orbit returned (to 1e-9 relative) to an earlier orbit point, so it
    /// is numerically preperiodic and counted as bounded even if rounding
    /// later pushes it off a repelling cycle.
    bool preperiodic = false;
    int preperiod = -1;
    int period = -1;
};

struct ConnectivityReport {
    Connectivity kind;
    std::vector<CriticalOrbit> orbits;
    std::string caveat;
};

/// Critical orbit classification with cycle detection.
inline CriticalOrbit classify_critical_orbit(const DynSetup& setup, const Root& c) {
    CriticalOrbit out{c, {OrbitClass::Kind::Bounded, setup.max_iter}};
    std::vector<Complex> orbit{c.z};
    Complex z = c.z;
    if (std::abs(z) > setup.radius) {
        out.orbit = {OrbitClass::Kind::Escaped, 0};
        return out;
    }
    for (int k = 1; k <= setup.max_iter; ++k) {
        z = setup.p(z);
        if (!(std::abs(z) <= setup.radius)) {
            out.orbit = {OrbitClass::Kind::Escaped, k};
            return out;
        }
        const double tol = 1e-9 * std::max(1.0, std::abs(z));
        for (std::size_t j = 0; j < orbit.size(); ++j) {
            if (std::abs(orbit[j] - z) <= tol) {
                out.preperiodic = true;
                out.preperiod = static_cast<int>(j);
                out.period = k - static_cast<int>(j);
                out.orbit = {OrbitClass::Kind::Bounded, k};
                return out;
            }
        }
        orbit.push_back(z);
    }
    return out;
}

/// Connected iff every critical orbit is bounded; all escaping is sufficient
/// for a totally disconnected Julia set; anything else is Disconnected.
inline ConnectivityReport connectivity_class(const DynSetup& setup) {
    ConnectivityReport report{Connectivity::Connected, {},
                              "TotallyDisconnected and Disconnected are sufficient-condition labels; "
                              "total disconnectedness does not imply that all critical points escape"};
    int escaped = 0;
    for (const auto& c : critical_points(setup.p)) {
        report.orbits.push_back(classify_critical_orbit(setup, c));
        if (report.orbits.back().orbit.escaped()) ++escaped;
    }
    const int total = static_cast<int>(report.orbits.size());
    if (escaped == 0) report.kind = Connectivity::Connected;
    else if (escaped == total) report.kind = Connectivity::TotallyDisconnected;
    else report.kind = Connectivity::Disconnected;
    return report;
}

/// Axis-aligned rectangle in the plane.
struct Box {
    double xmin, xmax, ymin, ymax;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

/// Pixel frame: box sampled at pixel centers, row 0 at the top (ymax).
struct Frame {
    Box box;
    int width;
    int height;

    Frame(Box b, int w, int h) : box(b), width(w), height(h) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("Frame: dimensions must be positive");
        if (!(b.width() > 0.0 && b.height() > 0.0)) throw std::invalid_argument("Frame: box must have positive area");
    }

    double pitch_x() const { return box.width() / width; }
    double pitch_y() const { return box.height() / height; }
    double pitch() const { return std::max(pitch_x(), pitch_y()); }

    std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col);
    }

    Complex center(int col, int row) const {
        return {box.xmin + (col + 0.5) * pitch_x(), box.ymax - (row + 0.5) * pitch_y()};
    }
    Complex center(std::size_t idx) const {
        return center(static_cast<int>(idx % static_cast<std::size_t>(width)),
                      static_cast<int>(idx / static_cast<std::size_t>(width)));
    }

    /// Pixel containing z, or false if z is outside the box.
    bool locate(Complex z, int& col, int& row) const {
        const double fx = (z.real() - box.xmin) / pitch_x();
        const double fy = (box.ymax - z.imag()) / pitch_y();
        if (!(fx >= 0.0 && fy >= 0.0 && fx < width && fy < height)) return false;
        col = static_cast<int>(fx);
        row = static_cast<int>(fy);
        return true;
    }

    /// Square frame [-half, half]^2 shifted by half a pitch vertically so
    /// that one row of pixel centers lies exactly on the real axis.
    static Frame real_axis_aligned(double half, int resolution) {
        const double pitch = 2.0 * half / resolution;
        return Frame({-half, half, -half + 0.5 * pitch, half + 0.5 * pitch}, resolution, resolution);
    }
};

struct RasterImage {
    Frame frame;
    std::vector<std::uint8_t> values; ///< row-major, row 0 at the top

    std::uint8_t at(int col, int row) const { return values[frame.index(col, row)]; }
};

/// Escape-time image: 0 for Bounded, min(k, 255) for Escaped(k). Points
/// already outside D(0,R) (k = 0) are stored as 1 so that 0 means Bounded.
inline RasterImage render(const DynSetup& setup, const Frame& frame, int threads = 0) {
    RasterImage img{frame, std::vector<std::uint8_t>(frame.size(), 0)};
    parallel_for(static_cast<std::size_t>(frame.height), threads, [&](std::size_t row) {
        for (int col = 0; col < frame.width; ++col) {
            const OrbitClass c = classify(setup, frame.center(col, static_cast<int>(row)));
            img.values[frame.index(col, static_cast<int>(row))] =
                c.bounded() ? std::uint8_t{0} : static_cast<std::uint8_t>(std::clamp(c.steps, 1, 255));
        }
    });
    return img;
}

/// Binary PGM (P5, maxval 255), one byte per pixel, row-major.
inline void write_pgm(std::ostream& os, int width, int height, const std::vector<std::uint8_t>& values) {
    os << "P5\n" << width << ' ' << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size()));
}

inline void write_pgm(std::ostream& os, const RasterImage& img) {
    write_pgm(os, img.frame.width, img.frame.height, img.values);
}

} // namespace polydyn

#endif // POLYDYN_ESCAPE_HPP
