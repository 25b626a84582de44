#include "stiffbench/retargeting.hpp"

#include <cmath>

#include "stiffbench/error.hpp"

namespace stiffbench {

bool FingerId::valid() const {
    if (side == Side::Leader) return name != FingerName::Ring;
    if (side == Side::Follower) return name != FingerName::Middle;
    return false;
}

std::string_view finger_name(FingerName name) {
    switch (name) {
        case FingerName::Thumb: return "thumb";
        case FingerName::Index: return "index";
        case FingerName::Middle: return "middle";
        case FingerName::Ring: return "ring";
    }
    return "?";
}

std::string FingerId::to_string() const {
    std::string out = side == Side::Leader ? "leader." : "follower.";
    out += finger_name(name);
    return out;
}

FingerId parse_finger(std::string_view text) {
    for (const auto& f : kLeaderFingers)
        if (f.to_string() == text) return f;
    for (const auto& f : kFollowerFingers)
        if (f.to_string() == text) return f;
    throw InvalidArgument("unknown finger '" + std::string(text) + "'");
}

FingerId map_finger(FingerId leader) {
    if (leader.side != Side::Leader || !leader.valid())
        throw InvalidArgument("not a leader finger: " + leader.to_string());
    FingerId out{Side::Follower, leader.name};
    if (leader.name == FingerName::Middle) out.name = FingerName::Ring;
    return out;
}

FingerId inverse_map_finger(FingerId follower) {
    if (follower.side != Side::Follower || !follower.valid())
        throw InvalidArgument("not a follower finger: " + follower.to_string());
    FingerId out{Side::Leader, follower.name};
    if (follower.name == FingerName::Ring) out.name = FingerName::Middle;
    return out;
}

std::size_t finger_slot(FingerId finger) {
    if (!finger.valid()) throw InvalidArgument("invalid finger: " + finger.to_string());
    switch (finger.name) {
        case FingerName::Thumb: return 0;
        case FingerName::Index: return 1;
        case FingerName::Middle:
        case FingerName::Ring: return 2;
    }
    throw InvalidArgument("invalid finger");
}

std::string_view mismatch_kind_name(MismatchKind kind) {
    return kind == MismatchKind::LinearRatio ? "linear" : "piecewise";
}

MismatchKind parse_mismatch_kind(std::string_view text) {
    if (text == "linear" || text == "linear-ratio") return MismatchKind::LinearRatio;
    if (text == "piecewise") return MismatchKind::Piecewise;
    throw InvalidArgument("unknown mismatch profile '" + std::string(text) + "'");
}

void DeviceProfile::validate() const {
    for (const auto& r : ranges) {
        if (!(r.leader_max_mm > 0.0) || !(r.follower_max_mm > 0.0))
            throw InvalidArgument("device ranges must be positive");
    }
    if (mismatch.kind == MismatchKind::Piecewise) {
        const double kl = mismatch.knee_leader_fraction;
        const double kf = mismatch.knee_follower_fraction;
        if (!(kl > 0.0 && kl < 1.0 && kf > 0.0 && kf < 1.0))
            throw InvalidArgument("piecewise knee must lie strictly inside (0,1)x(0,1)");
    }
}

double leader_to_follower_displacement(double dz_leader, FingerId finger, const DeviceProfile& profile) {
    const FingerRange& r = profile.range(finger);
    if (!(dz_leader >= 0.0) || dz_leader > r.leader_max_mm)
        throw InvalidArgument("leader displacement out of range");

    const double u = dz_leader / r.leader_max_mm;
    double v = u;
    if (profile.mismatch.kind == MismatchKind::Piecewise) {
        const double kl = profile.mismatch.knee_leader_fraction;
        const double kf = profile.mismatch.knee_follower_fraction;
        v = u <= kl ? u * (kf / kl) : kf + (u - kl) * ((1.0 - kf) / (1.0 - kl));
    }
    if (u == 1.0) return r.follower_max_mm;
    return v * r.follower_max_mm;
}

double delta_ratio(const DisplacementPair& pair, double epsilon_mm) {
    if (!(pair.dz_follower > epsilon_mm)) throw NearZeroFollowerDisplacement(pair.dz_follower);
    return pair.dz_leader / pair.dz_follower;
}

double beta(const DeviceProfile& profile, FingerId finger) {
    const FingerRange& r = profile.range(finger);
    if (!(r.leader_max_mm > 0.0)) throw InvalidArgument("zero leader range");
    return r.follower_max_mm / r.leader_max_mm;
}

}  // namespace stiffbench
