#include "stiffbench/feedback.hpp"

#include <algorithm>
#include <string>

#include "stiffbench/error.hpp"

namespace stiffbench {

FeedbackMethod parse_method(std::string_view text) {
    if (text == "1" || text == "I") return FeedbackMethod::Force;
    if (text == "2" || text == "II") return FeedbackMethod::ForceDisplacement;
    throw InvalidArgument("feedback method must be 1 or 2, got '" + std::string(text) + "'");
}

bool gate(double f_follower, const FeedbackConfig& config) { return f_follower < config.sensor.f_min; }

double method1(double f_follower, const FeedbackConfig& config) {
    if (gate(f_follower, config)) return 0.0;
    return config.alpha() * clip_to_range(f_follower, config.sensor);
}

double method2(double f_follower, const DisplacementPair& displacement, const DeviceProfile& profile,
               FingerId finger, const FeedbackConfig& config) {
    if (gate(f_follower, config)) return 0.0;
    if (!(displacement.dz_follower > config.epsilon_mm)) return 0.0;
    const double f = method1(f_follower, config) * delta_ratio(displacement, config.epsilon_mm) *
                     beta(profile, finger);
    return config.clamp_output ? std::min(f, config.f_leader_max) : f;
}

StiffnessEstimate estimate_stiffness(double f_follower, double dz_follower, FingerId finger, double epsilon_mm) {
    if (!(dz_follower > epsilon_mm)) throw NearZeroFollowerDisplacement(dz_follower);
    return {finger, f_follower / dz_follower};
}

RenderResult render(FingerId leader_finger, double f_follower, const DisplacementPair& displacement,
                    const DeviceProfile& profile, const FeedbackConfig& config) {
    RenderResult out;
    out.force.finger = leader_finger;
    out.gated = gate(f_follower, config);
    out.near_zero_displacement = !(displacement.dz_follower > config.epsilon_mm);
    if (!out.near_zero_displacement) {
        out.k_hat = estimate_stiffness(f_follower, displacement.dz_follower, map_finger(leader_finger),
                                       config.epsilon_mm);
    }
    if (out.gated) return out;
    out.force.method1 = method1(f_follower, config);
    out.force.method2 = method2(f_follower, displacement, profile, leader_finger, config);
    return out;
}

}  // namespace stiffbench
