#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stiffbench/retargeting.hpp"
#include "stiffbench/rng.hpp"

namespace stiffbench {

// ---------------------------------------------------------------------------
// Sample catalog
// ---------------------------------------------------------------------------

/// Catalog labels; the numeric value is the stiffness level 1..5.
enum class SampleLabel : std::uint8_t { UltraSoft = 1, Soft = 2, Medium = 3, LightHard = 4, Hard = 5 };

enum class ShoreScale : std::uint8_t { OO, A };

std::string_view label_name(SampleLabel label);
SampleLabel parse_label(std::string_view text);
std::string_view scale_name(ShoreScale scale);
ShoreScale parse_scale(std::string_view text);

/// Geometry used to turn a Shore reading into a contact stiffness.
struct ContactGeometry {
    double contact_radius_mm = 2.0;      ///< flat-punch radius of the fingertip pad
    double poisson_ratio = 0.5;          ///< silicone elastomers are near-incompressible
    double oo_indenter_radius_mm = 1.19; ///< hemispherical type-OO durometer tip
};

struct SampleSpec {
    SampleLabel label = SampleLabel::UltraSoft;
    std::string material;
    ShoreScale shore_scale = ShoreScale::OO;
    double shore_value = 0.0;
    double youngs_modulus_mpa = 0.0;
    double stiffness = 0.0;  ///< N/mm

    [[nodiscard]] int stiffness_level() const { return static_cast<int>(label); }
};

/// Young's modulus (MPa) from a durometer reading.
///
/// Shore A uses Gent's relation
///   E = 0.0981 (56 + 7.62336 S) / (0.137505 (254 - 2.54 S)).
/// Shore OO inverts the Hertz sphere contact for the type-OO durometer:
/// spring force 0.2039 + 0.00908 S newtons at indentation 2.54 (1 - S/100) mm
/// under a 1.19 mm hemispherical tip.
double shore_to_modulus(ShoreScale scale, double value, const ContactGeometry& geometry = {});

/// Flat-punch contact stiffness 2 a E / (1 - nu^2) in N/mm.
double shore_to_stiffness(ShoreScale scale, double value, const ContactGeometry& geometry = {});

/// The five silicone samples, softest first.
std::vector<SampleSpec> catalog(const ContactGeometry& geometry = {});

/// Builds one catalog entry with its derived stiffness.
SampleSpec make_sample(SampleLabel label, std::string material, ShoreScale scale, double value,
                       const ContactGeometry& geometry);

const SampleSpec& sample_at_level(std::span<const SampleSpec> samples, int level);

/// Compression of the sample when a position-servoed finger with finite
/// stiffness is commanded `commanded_mm` past first contact (springs in series).
double compliant_indentation(double commanded_mm, double sample_stiffness, double servo_stiffness);

// ---------------------------------------------------------------------------
// Tactile fingertip
// ---------------------------------------------------------------------------

/// Valid operating range of the aggregated fingertip force, in raw counts.
struct SensorRange {
    double f_min = 30.0;
    double f_max = 1000.0;
    double counts_per_newton = 100.0;

    void validate() const;
};

struct FingertipReading {
    FingerId finger{Side::Follower, FingerName::Thumb};
    std::array<double, 4> z_forces{};
    std::array<std::array<double, 2>, 4> xy_forces{};  // carried, never used for feedback
    std::uint64_t timestamp = 0;

    friend bool operator==(const FingertipReading&, const FingertipReading&) = default;
};

/// Relative Gaussian noise applied per channel.
struct NoiseModel {
    double relative_sigma = 0.02;
};

inline constexpr std::array<double, 4> kChannelWeights{0.4, 0.3, 0.2, 0.1};

/// Four-taxel magnetic fingertip on one follower finger.
///
/// The load is split over the taxels with kChannelWeights, permuted afresh
/// at each begin_contact(). Each channel then picks up multiplicative noise.
class TactileFingertip {
public:
    TactileFingertip(FingerId finger, SensorRange range, NoiseModel noise, std::uint64_t seed);

    void begin_contact();

    /// Reading for a sample compressed by depth_mm.
    FingertipReading press(const SampleSpec& sample, double depth_mm, std::uint64_t tick);

    [[nodiscard]] const std::array<double, 4>& weights() const { return weights_; }

private:
    FingerId finger_;
    SensorRange range_;
    NoiseModel noise_;
    Rng rng_;
    std::array<double, 4> weights_ = kChannelWeights;
};

/// One-shot reading with a fresh contact. Depth 0 gives an all-zero reading.
FingertipReading compress(const SampleSpec& sample, double depth_mm, const SensorRange& range,
                          std::uint64_t noise_seed, NoiseModel noise = {});

/// Largest z channel.
double aggregate_max(const FingertipReading& reading);

/// Clamps from above at f_max; values below f_min are left to gating.
double clip_to_range(double f, const SensorRange& range);

/// counts_per_newton such that the strongest taxel reads f_max when the
/// stiffest catalog sample is compressed by `full_depth_mm`.
double calibrate_counts_per_newton(const SampleSpec& stiffest, double full_depth_mm, double f_max);

}  // namespace stiffbench
