#pragma once

#include <array>

#include "lumen/histogram.hpp"
#include "lumen/image.hpp"

namespace lumen {

/// Tunables of the illumination-adaptive enhancement stage. The defaults are
/// deliberately mild; every value is exposed through the pipeline config.
struct EnhancementConfig {
    double sigma = 1.0;        // Gaussian std-dev in pixels
    int kernel_size = 5;       // odd Gaussian kernel side
    double lambda = 0.5;       // weighted-distribution smoothness exponent
    double tau = 0.2;          // lower bound for per-level gamma
    double mu_expected = 110;  // expected mean intensity
    double t_bright = 0.35;    // deviation above which a frame counts as Bright
    double t_dim = -0.35;      // deviation below which a frame counts as Dim
    double epsilon = 0.8;      // gamma-correction blend weight
    double eta = 0.6;          // sharpening blend weight

    void validate() const;
};

enum class BrightnessClass { Dim, Normal, Bright };

/// Brightness classification of a frame: relative deviation of the mean
/// intensity from the expected mean, bucketed by the config thresholds.
struct Brightness {
    BrightnessClass cls = BrightnessClass::Normal;
    double deviation = 0.0;  // (mean - mu_expected) / mu_expected
    double mean = 0.0;
};

const char* to_string(BrightnessClass cls);

/// Per-level gamma exponents and the resulting intensity mapping.
/// gamma is nonincreasing in the intensity level and clamped to [tau, 1];
/// map is monotonically nondecreasing with map(0)=0 and map(255)=255.
struct GammaLUT {
    std::array<double, 256> gamma{};
    std::array<std::uint8_t, 256> map{};
};

/// Output of the enhancement stage plus its intermediates.
struct EnhancedFrame {
    GrayImage output;           // final enhanced image
    GrayImage blurred;          // Gaussian-filtered input
    GrayImage gamma_corrected;  // adaptive gamma applied to the blurred image
    SignedImage mask;           // unsharp mask (input - blurred)
    Brightness brightness;
};

/// Samples the 2-D Gaussian on a size x size grid centered at the origin,
/// then renormalizes the weights to sum to 1.
Kernel gaussian_kernel(double sigma, int size);

/// Gaussian blur, quantized back to 8 bits (round half up, clamp).
GrayImage gaussian_blur(const GrayImage& img, const EnhancementConfig& cfg);

Brightness classify_brightness(const GrayImage& img, const EnhancementConfig& cfg);

/// Builds the adaptive gamma LUT from an intensity distribution.
///
/// The weighted distribution uses P_min taken over occupied bins only
/// (levels with p > 0); empty bins carry zero weight. When the occupied
/// bins all share one probability (P_max == P_min) the weighting is
/// degenerate and falls back to the distribution itself.
GammaLUT agcwd_lut(const ProbDist& dist, const EnhancementConfig& cfg);

/// Per-pixel LUT application.
GrayImage apply_gamma(const GrayImage& img, const GammaLUT& lut);

/// Signed difference image - blurred. Throws DimensionError on mismatch.
SignedImage unsharp_mask(const GrayImage& img, const GrayImage& blurred);

/// Full enhancement pipeline: blur, classify brightness on the blurred
/// image, gamma-correct (through an intensity inversion for Bright frames,
/// so the output keeps the original polarity), and blend in the unsharp
/// mask. All arithmetic is double precision; the result is quantized once.
EnhancedFrame enhance(const GrayImage& img, const EnhancementConfig& cfg);

}  // namespace lumen
