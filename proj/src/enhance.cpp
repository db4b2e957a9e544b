#include "lumen/enhance.hpp"

#include <cmath>
#include <numbers>

#include "lumen/convolve.hpp"
#include "lumen/errors.hpp"

namespace lumen {

void EnhancementConfig::validate() const {
    if (!(sigma > 0)) throw ConfigError("enhancement.sigma must be > 0");
    if (kernel_size < 3 || kernel_size % 2 == 0)
        throw ConfigError("enhancement.kernel_size must be odd and >= 3");
    if (!(lambda > 0)) throw ConfigError("enhancement.lambda must be > 0");
    if (!(tau > 0 && tau <= 1)) throw ConfigError("enhancement.tau must be in (0,1]");
    if (!(mu_expected > 0 && mu_expected < 255))
        throw ConfigError("enhancement.mu_expected must be in (0,255)");
    if (epsilon < 0) throw ConfigError("enhancement.epsilon must be >= 0");
    if (eta < 0) throw ConfigError("enhancement.eta must be >= 0");
    if (!(t_dim < 0 && 0 < t_bright))
        throw ConfigError("enhancement must satisfy t_dim < 0 < t_bright");
}

const char* to_string(BrightnessClass cls) {
    switch (cls) {
        case BrightnessClass::Dim: return "dim";
        case BrightnessClass::Bright: return "bright";
        case BrightnessClass::Normal: break;
    }
    return "normal";
}

Kernel gaussian_kernel(double sigma, int size) {
    if (!(sigma > 0)) throw BadSigmaError("gaussian_kernel: sigma must be > 0");
    if (size <= 0 || size % 2 == 0) throw EvenKernelError("gaussian_kernel: size must be odd");

    Kernel k{size, size, std::vector<double>(static_cast<std::size_t>(size) * size)};
    const int r = size / 2;
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
    double sum = 0.0;
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x) {
            const double w = norm * std::exp(-(static_cast<double>(x) * x + static_cast<double>(y) * y) /
                                             (2.0 * sigma * sigma));
            k.at(y + r, x + r) = w;
            sum += w;
        }
    }
    for (auto& w : k.weights) w /= sum;
    return k;
}

GrayImage gaussian_blur(const GrayImage& img, const EnhancementConfig& cfg) {
    const SignedImage real = convolve(img, gaussian_kernel(cfg.sigma, cfg.kernel_size));
    GrayImage out(img.width(), img.height());
    const auto& src = real.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = quantize_u8(src[i]);
    return out;
}

Brightness classify_brightness(const GrayImage& img, const EnhancementConfig& cfg) {
    std::uint64_t sum = 0;
    for (std::uint8_t v : img.data()) sum += v;
    const double mean = static_cast<double>(sum) / static_cast<double>(img.size());
    const double t = (mean - cfg.mu_expected) / cfg.mu_expected;

    Brightness b;
    b.mean = mean;
    b.deviation = t;
    if (t > cfg.t_bright)
        b.cls = BrightnessClass::Bright;
    else if (t < cfg.t_dim)
        b.cls = BrightnessClass::Dim;
    return b;
}

GammaLUT agcwd_lut(const ProbDist& dist, const EnhancementConfig& cfg) {
    // P_min over occupied bins; empty bins stay at zero weight so the
    // weighting never raises a negative base to a fractional exponent.
    double p_max = 0.0;
    double p_min = 1.0;
    for (double p : dist.p) {
        if (p > p_max) p_max = p;
        if (p > 0.0 && p < p_min) p_min = p;
    }

    std::array<double, 256> weighted{};
    if (p_max == p_min) {
        weighted = dist.p;  // degenerate weighting, keep the distribution
    } else {
        for (int i = 0; i < 256; ++i) {
            if (dist.p[i] > 0.0)
                weighted[i] = p_max * std::pow((dist.p[i] - p_min) / (p_max - p_min), cfg.lambda);
        }
    }

    double total = 0.0;
    for (double w : weighted) total += w;

    GammaLUT lut;
    double cumulative = 0.0;
    for (int i = 0; i < 256; ++i) {
        cumulative += weighted[i];
        const double cdf = cumulative / total;
        lut.gamma[i] = std::max(cfg.tau, 1.0 - cdf);
        lut.map[i] = quantize_u8(255.0 * std::pow(static_cast<double>(i) / 255.0, lut.gamma[i]));
    }
    return lut;
}

GrayImage apply_gamma(const GrayImage& img, const GammaLUT& lut) {
    GrayImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut.map[src[i]];
    return out;
}

SignedImage unsharp_mask(const GrayImage& img, const GrayImage& blurred) {
    if (img.width() != blurred.width() || img.height() != blurred.height())
        throw DimensionError("unsharp_mask: image and blurred dimensions differ");
    SignedImage mask(img.width(), img.height());
    const auto& a = img.data();
    const auto& b = blurred.data();
    auto& m = mask.data();
    for (std::size_t i = 0; i < a.size(); ++i)
        m[i] = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    return mask;
}

EnhancedFrame enhance(const GrayImage& img, const EnhancementConfig& cfg) {
    GrayImage blurred = gaussian_blur(img, cfg);
    const Brightness brightness = classify_brightness(blurred, cfg);

    GrayImage gamma_corrected = [&] {
        if (brightness.cls == BrightnessClass::Bright) {
            // Over-bright frames are dimmed by inverting intensities before
            // gamma correction and inverting back afterwards, keeping the
            // output in the original polarity.
            const GrayImage inverted = invert(blurred);
            const GammaLUT lut = agcwd_lut(normalize_histogram(histogram(inverted)), cfg);
            return invert(apply_gamma(inverted, lut));
        }
        const GammaLUT lut = agcwd_lut(normalize_histogram(histogram(blurred)), cfg);
        return apply_gamma(blurred, lut);
    }();

    SignedImage mask = unsharp_mask(img, blurred);

    GrayImage output(img.width(), img.height());
    const auto& vb = blurred.data();
    const auto& vg = gamma_corrected.data();
    const auto& vm = mask.data();
    auto& vo = output.data();
    for (std::size_t i = 0; i < vo.size(); ++i) {
        const double v = static_cast<double>(vb[i]) +
                         cfg.epsilon * (static_cast<double>(vg[i]) - static_cast<double>(vb[i])) +
                         cfg.eta * vm[i];
        vo[i] = quantize_u8(v);
    }

    return EnhancedFrame{std::move(output), std::move(blurred), std::move(gamma_corrected),
                         std::move(mask), brightness};
}

}  // namespace lumen
