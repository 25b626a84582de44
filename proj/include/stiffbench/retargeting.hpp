#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace stiffbench {

enum class Side : std::uint8_t { Leader = 0, Follower = 1 };
enum class FingerName : std::uint8_t { Thumb = 0, Index = 1, Middle = 2, Ring = 3 };

/// A finger on one side of the teleoperation link.
///
/// The glove (leader) drives thumb, index and middle; the robot hand
/// (follower) uses thumb, index and ring.
struct FingerId {
    Side side = Side::Leader;
    FingerName name = FingerName::Thumb;

    [[nodiscard]] bool valid() const;
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const FingerId&, const FingerId&) = default;
};

inline constexpr std::array<FingerId, 3> kLeaderFingers{{
    {Side::Leader, FingerName::Thumb},
    {Side::Leader, FingerName::Index},
    {Side::Leader, FingerName::Middle},
}};

inline constexpr std::array<FingerId, 3> kFollowerFingers{{
    {Side::Follower, FingerName::Thumb},
    {Side::Follower, FingerName::Index},
    {Side::Follower, FingerName::Ring},
}};

std::string_view finger_name(FingerName name);
FingerId parse_finger(std::string_view text);

/// Control mapping leader -> follower: thumb->thumb, index->index,
/// middle->ring. Throws InvalidArgument for anything else.
FingerId map_finger(FingerId leader);

/// Sensing mapping follower -> leader; inverse of map_finger.
FingerId inverse_map_finger(FingerId follower);

/// Slot 0..2 of a finger in the pair tables (thumb, index, middle/ring).
std::size_t finger_slot(FingerId finger);

enum class MismatchKind : std::uint8_t { LinearRatio, Piecewise };

std::string_view mismatch_kind_name(MismatchKind kind);
MismatchKind parse_mismatch_kind(std::string_view text);

/// Maximum z travel (mm) of one leader/follower finger pair.
struct FingerRange {
    double leader_max_mm = 20.0;
    double follower_max_mm = 10.0;
};

/// Shape of the leader -> follower displacement map.
///
/// LinearRatio scales by follower_max / leader_max. Piecewise passes
/// through (knee_leader * leader_max, knee_follower * follower_max), which
/// breaks the proportionality that makes Method II collapse to Method I.
struct MismatchProfile {
    MismatchKind kind = MismatchKind::Piecewise;
    double knee_leader_fraction = 0.5;
    double knee_follower_fraction = 0.65;
};

struct DeviceProfile {
    std::array<FingerRange, 3> ranges{{{18.0, 8.0}, {22.0, 10.0}, {22.0, 10.0}}};
    MismatchProfile mismatch{};

    /// Accepts either side of a pair.
    [[nodiscard]] const FingerRange& range(FingerId finger) const { return ranges[finger_slot(finger)]; }
    FingerRange& range(FingerId finger) { return ranges[finger_slot(finger)]; }

    /// Throws InvalidArgument when a range is non-positive or the knee is
    /// outside the open unit square.
    void validate() const;
};

struct DisplacementPair {
    double dz_leader = 0.0;
    double dz_follower = 0.0;
};

inline constexpr double kFollowerEpsilonMm = 0.05;

/// Commanded follower displacement for a leader displacement measured from
/// first contact. Requires 0 <= dz_leader <= leader_max.
double leader_to_follower_displacement(double dz_leader, FingerId finger, const DeviceProfile& profile);

/// Leader over follower displacement. Throws NearZeroFollowerDisplacement
/// when dz_follower <= epsilon.
double delta_ratio(const DisplacementPair& pair, double epsilon_mm = kFollowerEpsilonMm);

/// Follower range over leader range for the finger pair.
double beta(const DeviceProfile& profile, FingerId finger);

}  // namespace stiffbench
