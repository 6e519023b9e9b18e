#include "mziforge/variation_map.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mziforge {

namespace {

double rms_about_zero(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return v.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(v.size()));
}

} // namespace

VariationMap generate_variation_map(std::size_t width, std::size_t height, double sigma,
                                    MapKind kind, bool radial, std::size_t corr_len,
                                    RngStream& rng, bool renormalize) {
    if (width == 0 || height == 0)
        throw std::invalid_argument("generate_variation_map: empty grid");
    if (corr_len < 1)
        throw std::invalid_argument("generate_variation_map: correlation length must be >= 1");
    if (sigma < 0.0)
        throw std::invalid_argument("generate_variation_map: negative sigma");

    VariationMap map;
    map.width = width;
    map.height = height;
    map.values.assign(width * height, 0.0);
    if (sigma == 0.0) return map;

    const double target =
        kind == MapKind::phase ? 2.0 * std::numbers::pi * sigma : sigma / std::numbers::sqrt2;

    const double cx = (static_cast<double>(width) - 1.0) / 2.0;
    const double cy = (static_cast<double>(height) - 1.0) / 2.0;
    const double dmax = std::hypot(cx, cy);

    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            double scale = 1.0;
            if (radial)
                scale = dmax > 0.0
                            ? std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy) / dmax
                            : 1.0;
            map.at(x, y) = target * scale * rng.gaussian();
        }
    }

    if (corr_len <= 1) return map;

    const double len = static_cast<double>(corr_len);
    const double amp = 2.0 / (std::sqrt(std::numbers::pi) * len);
    // Kernel table over all offsets; decays twice as fast along x as
    // along y.
    std::vector<double> kern((2 * width - 1) * (2 * height - 1));
    for (std::size_t iy = 0; iy < 2 * height - 1; ++iy) {
        const double dy = static_cast<double>(iy) - (static_cast<double>(height) - 1.0);
        for (std::size_t ix = 0; ix < 2 * width - 1; ++ix) {
            const double dx = static_cast<double>(ix) - (static_cast<double>(width) - 1.0);
            kern[iy * (2 * width - 1) + ix] = amp * std::exp(-(2.0 * dx * dx + dy * dy) / (len * len));
        }
    }

    VariationMap out = map;
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            double acc = 0.0;
            for (std::size_t ys = 0; ys < height; ++ys) {
                const std::size_t ky = y - ys + height - 1;
                for (std::size_t xs = 0; xs < width; ++xs) {
                    const std::size_t kx = x - xs + width - 1;
                    acc += map.at(xs, ys) * kern[ky * (2 * width - 1) + kx];
                }
            }
            out.at(x, y) = acc;
        }
    }

    if (renormalize) {
        const double before = rms_about_zero(map.values);
        const double after = rms_about_zero(out.values);
        if (after > 0.0) {
            const double factor = before / after;
            for (double& v : out.values) v *= factor;
        }
    }
    return out;
}

std::string variation_map_csv(const VariationMap& map, double sigma, MapKind kind, bool radial,
                              std::size_t corr_len) {
    std::ostringstream os;
    os.precision(17);
    os << "width,height,sigma,kind,radial,L\n";
    os << map.width << ',' << map.height << ',' << sigma << ','
       << (kind == MapKind::phase ? "phase" : "splitter") << ',' << (radial ? 1 : 0) << ','
       << corr_len << '\n';
    for (std::size_t y = 0; y < map.height; ++y) {
        for (std::size_t x = 0; x < map.width; ++x) {
            if (x) os << ',';
            os << map.at(x, y);
        }
        os << '\n';
    }
    return os.str();
}

} // namespace mziforge
