#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lumen/image.hpp"

namespace lumen {

/// 256-bit binary descriptor packed into four 64-bit words.
struct Descriptor256 {
    std::array<std::uint64_t, 4> words{};
    int keypoint_index = -1;

    bool operator==(const Descriptor256& other) const { return words == other.words; }
};

int hamming_distance(const Descriptor256& a, const Descriptor256& b);

/// Candidate correspondence between two descriptor sets.
struct Match {
    int index_a = -1;
    int index_b = -1;
    int hamming = 0;
    double ratio = 0.0;  // best/second-best distance; 0 when second-best absent
};

/// Patch radius of the intensity-centroid orientation.
inline constexpr int kOrientationRadius = 15;

/// Border margin the steered pattern needs; rotated sample offsets never
/// exceed this.
inline constexpr int kDescriptorMargin = 19;

/// Intensity-centroid orientation over the radius-15 circular patch
/// centered at (x, y): atan2(m01, m10). Returns the 0 sentinel when the
/// patch does not fit or both moments vanish.
double orientation(const GrayImage& img, int x, int y);

bool can_describe(const GrayImage& img, int x, int y);

/// Steered-BRIEF descriptor at (x, y). The 256-pair pattern is rotated by
/// the angle quantized to 30 bins of 12 degrees; bit b is set iff the first
/// sample of pair b is darker than the second. Throws PatchOutOfBoundsError
/// when the rotated pattern cannot stay inside the image.
Descriptor256 describe(const GrayImage& img, int x, int y, double angle);

/// Mutual-consistency brute-force matcher with a ratio test on the query
/// side. Equal distances break toward the lower index. Throws
/// EmptySetError when either set is empty.
std::vector<Match> match_descriptors(const std::vector<Descriptor256>& set_a,
                                     const std::vector<Descriptor256>& set_b,
                                     double ratio_threshold = 0.8);

/// The vendored 256-pair sampling pattern, (x1,y1,x2,y2) per bit.
const std::array<std::int8_t, 1024>& orb_pattern();

}  // namespace lumen
