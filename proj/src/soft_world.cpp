#include "stiffbench/soft_world.hpp"

#include <algorithm>
#include <cmath>

#include "stiffbench/error.hpp"

namespace stiffbench {

std::string_view label_name(SampleLabel label) {
    switch (label) {
        case SampleLabel::UltraSoft: return "1-US";
        case SampleLabel::Soft: return "2-S";
        case SampleLabel::Medium: return "3-M";
        case SampleLabel::LightHard: return "4-LH";
        case SampleLabel::Hard: return "5-H";
    }
    return "?";
}

SampleLabel parse_label(std::string_view text) {
    for (int level = 1; level <= 5; ++level) {
        const auto label = static_cast<SampleLabel>(level);
        if (label_name(label) == text) return label;
    }
    throw InvalidArgument("unknown sample label '" + std::string(text) + "'");
}

std::string_view scale_name(ShoreScale scale) { return scale == ShoreScale::OO ? "OO" : "A"; }

ShoreScale parse_scale(std::string_view text) {
    if (text == "OO" || text == "00") return ShoreScale::OO;
    if (text == "A") return ShoreScale::A;
    throw InvalidArgument("unknown Shore scale '" + std::string(text) + "'");
}

double shore_to_modulus(ShoreScale scale, double value, const ContactGeometry& geometry) {
    if (!(value >= 0.0 && value <= 100.0)) throw InvalidArgument("Shore value must lie in [0, 100]");
    if (scale == ShoreScale::A) {
        if (value >= 100.0) throw InvalidArgument("Shore A 100 has no finite modulus");
        return 0.0981 * (56.0 + 7.62336 * value) / (0.137505 * (254.0 - 2.54 * value));
    }
    if (value >= 100.0) throw InvalidArgument("Shore OO 100 has no finite modulus");
    const double nu = geometry.poisson_ratio;
    const double force_n = 0.2039 + 0.00908 * value;
    const double depth_mm = 2.54 * (1.0 - value / 100.0);
    return 3.0 * (1.0 - nu * nu) * force_n /
           (4.0 * std::sqrt(geometry.oo_indenter_radius_mm) * std::pow(depth_mm, 1.5));
}

double shore_to_stiffness(ShoreScale scale, double value, const ContactGeometry& geometry) {
    const double e = shore_to_modulus(scale, value, geometry);
    const double nu = geometry.poisson_ratio;
    return 2.0 * geometry.contact_radius_mm * e / (1.0 - nu * nu);
}

SampleSpec make_sample(SampleLabel label, std::string material, ShoreScale scale, double value,
                       const ContactGeometry& geometry) {
    SampleSpec s;
    s.label = label;
    s.material = std::move(material);
    s.shore_scale = scale;
    s.shore_value = value;
    s.youngs_modulus_mpa = shore_to_modulus(scale, value, geometry);
    s.stiffness = shore_to_stiffness(scale, value, geometry);
    return s;
}

std::vector<SampleSpec> catalog(const ContactGeometry& geometry) {
    return {
        make_sample(SampleLabel::UltraSoft, "Ecoflex 00-10", ShoreScale::OO, 10.0, geometry),
        make_sample(SampleLabel::Soft, "Ecoflex 00-30", ShoreScale::OO, 30.0, geometry),
        make_sample(SampleLabel::Medium, "Ecoflex 00-50", ShoreScale::OO, 50.0, geometry),
        make_sample(SampleLabel::LightHard, "Dragon Skin 20", ShoreScale::A, 20.0, geometry),
        make_sample(SampleLabel::Hard, "Dragon Skin 30", ShoreScale::A, 30.0, geometry),
    };
}

const SampleSpec& sample_at_level(std::span<const SampleSpec> samples, int level) {
    for (const auto& s : samples)
        if (s.stiffness_level() == level) return s;
    throw InvalidArgument("no sample at stiffness level " + std::to_string(level));
}

double compliant_indentation(double commanded_mm, double sample_stiffness, double servo_stiffness) {
    if (commanded_mm <= 0.0) return 0.0;
    if (!std::isfinite(servo_stiffness)) return commanded_mm;
    return commanded_mm * servo_stiffness / (sample_stiffness + servo_stiffness);
}

void SensorRange::validate() const {
    if (!(f_min > 0.0 && f_min < f_max)) throw InvalidArgument("sensor range requires 0 < f_min < f_max");
    if (!(counts_per_newton > 0.0)) throw InvalidArgument("counts_per_newton must be positive");
}

TactileFingertip::TactileFingertip(FingerId finger, SensorRange range, NoiseModel noise, std::uint64_t seed)
    : finger_(finger), range_(range), noise_(noise), rng_(seed, "fingertip") {}

void TactileFingertip::begin_contact() {
    weights_ = kChannelWeights;
    rng_.shuffle(std::span<double>(weights_));
}

FingertipReading TactileFingertip::press(const SampleSpec& sample, double depth_mm, std::uint64_t tick) {
    FingertipReading r;
    r.finger = finger_;
    r.timestamp = tick;
    if (!(depth_mm > 0.0)) return r;

    const double total = sample.stiffness * depth_mm * range_.counts_per_newton;
    const double sigma = noise_.relative_sigma;
    for (std::size_t i = 0; i < 4; ++i) {
        double v = weights_[i] * total;
        if (sigma > 0.0) v *= 1.0 + sigma * rng_.normal();
        r.z_forces[i] = std::max(v, 0.0);
    }
    return r;
}

FingertipReading compress(const SampleSpec& sample, double depth_mm, const SensorRange& range,
                          std::uint64_t noise_seed, NoiseModel noise) {
    if (!(depth_mm >= 0.0)) throw InvalidArgument("compression depth must be non-negative");
    TactileFingertip tip({Side::Follower, FingerName::Index}, range, noise, noise_seed);
    tip.begin_contact();
    return tip.press(sample, depth_mm, 0);
}

double aggregate_max(const FingertipReading& reading) {
    return *std::max_element(reading.z_forces.begin(), reading.z_forces.end());
}

double clip_to_range(double f, const SensorRange& range) { return std::min(f, range.f_max); }

double calibrate_counts_per_newton(const SampleSpec& stiffest, double full_depth_mm, double f_max) {
    const double w_max = *std::max_element(kChannelWeights.begin(), kChannelWeights.end());
    const double newtons = stiffest.stiffness * full_depth_mm;
    if (!(newtons > 0.0)) throw InvalidArgument("calibration needs a positive full-squeeze force");
    return f_max / (w_max * newtons);
}

}  // namespace stiffbench
