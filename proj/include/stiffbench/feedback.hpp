#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "stiffbench/retargeting.hpp"
#include "stiffbench/soft_world.hpp"

namespace stiffbench {

enum class FeedbackMethod : std::uint8_t {
    Force = 1,              ///< Method I: force proportional to sensed force
    ForceDisplacement = 2,  ///< Method II: Method I scaled by the displacement ratio and beta
};

FeedbackMethod parse_method(std::string_view text);
inline int method_number(FeedbackMethod m) { return static_cast<int>(m); }

struct FeedbackConfig {
    double f_leader_max = 5.0;  ///< N, strongest force the glove renders
    SensorRange sensor{};
    bool clamp_output = true;  ///< cap Method II at f_leader_max
    double epsilon_mm = kFollowerEpsilonMm;

    /// Newtons per raw count, f_leader_max / f_max.
    [[nodiscard]] double alpha() const { return f_leader_max / sensor.f_max; }
};

struct FeedbackForce {
    FingerId finger{Side::Leader, FingerName::Thumb};
    double method1 = 0.0;
    double method2 = 0.0;

    friend bool operator==(const FeedbackForce&, const FeedbackForce&) = default;
};

struct StiffnessEstimate {
    FingerId finger{Side::Follower, FingerName::Thumb};
    double k_hat = 0.0;  ///< raw counts per mm

    friend bool operator==(const StiffnessEstimate&, const StiffnessEstimate&) = default;
};

/// True when the sensed force is below f_min and both methods render zero.
bool gate(double f_follower, const FeedbackConfig& config);

/// alpha * clip(f), or zero when gated.
double method1(double f_follower, const FeedbackConfig& config);

/// method1 * delta_ratio * beta, or zero when gated or the follower has not
/// moved past epsilon. Clamped to f_leader_max when clamp_output is set.
double method2(double f_follower, const DisplacementPair& displacement, const DeviceProfile& profile,
               FingerId finger, const FeedbackConfig& config);

/// K = F / dz. Throws NearZeroFollowerDisplacement when dz <= epsilon.
StiffnessEstimate estimate_stiffness(double f_follower, double dz_follower,
                                     FingerId finger = {Side::Follower, FingerName::Thumb},
                                     double epsilon_mm = kFollowerEpsilonMm);

/// Both rendering laws for one finger and tick.
struct RenderResult {
    FeedbackForce force;
    std::optional<StiffnessEstimate> k_hat;
    bool gated = false;
    bool near_zero_displacement = false;

    [[nodiscard]] double selected(FeedbackMethod m) const {
        return m == FeedbackMethod::Force ? force.method1 : force.method2;
    }
};

RenderResult render(FingerId leader_finger, double f_follower, const DisplacementPair& displacement,
                    const DeviceProfile& profile, const FeedbackConfig& config);

}  // namespace stiffbench
