#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "stiffbench/feedback.hpp"
#include "stiffbench/retargeting.hpp"
#include "stiffbench/soft_world.hpp"

namespace stiffbench {

/// Leader -> follower: where a glove finger is, relative to first contact.
struct PoseMessage {
    std::uint64_t seq = 0;
    std::uint64_t tick = 0;
    FingerId finger{Side::Leader, FingerName::Thumb};
    double dz_leader = 0.0;

    friend bool operator==(const PoseMessage&, const PoseMessage&) = default;
};

/// Follower -> leader: fingertip frame plus the follower's own displacement.
struct ForceMessage {
    std::uint64_t seq = 0;
    std::uint64_t tick = 0;
    FingerId finger{Side::Follower, FingerName::Thumb};
    FingertipReading reading{};
    double f_aggregate = 0.0;  ///< clip_to_range(aggregate_max(reading))
    double dz_follower = 0.0;

    friend bool operator==(const ForceMessage&, const ForceMessage&) = default;
};

/// What the glove rendered for one finger and tick.
struct FeedbackMessage {
    std::uint64_t seq = 0;
    std::uint64_t tick = 0;
    FingerId finger{Side::Leader, FingerName::Thumb};
    FeedbackForce rendered{};
    std::optional<StiffnessEstimate> k_hat;

    friend bool operator==(const FeedbackMessage&, const FeedbackMessage&) = default;
};

using Message = std::variant<PoseMessage, ForceMessage, FeedbackMessage>;

enum class MessageKind : std::uint8_t { Pose = 1, Force = 2, Feedback = 3 };

MessageKind kind_of(const Message& m);
FingerId finger_of(const Message& m);
std::uint64_t seq_of(const Message& m);

// Wire layout, all integers and IEEE-754 doubles little-endian:
//
//   0  "THB"            magic
//   3  '1'              format version
//   4  u8 kind
//   5  u64 seq, u64 tick, finger (u8 side, u8 name)
//   23 payload
//
// Pose     payload: f64 dz_leader                                    (31 bytes total)
// Force    payload: finger, u64 timestamp, f64 z[4], f64 xy[4][2],
//                   f64 f_aggregate, f64 dz_follower                 (145 bytes total)
// Feedback payload: finger, f64 method1, f64 method2, u8 has_k_hat,
//                   [finger, f64 k_hat]                              (42 or 52 bytes)

inline constexpr std::size_t kPoseFrameSize = 31;
inline constexpr std::size_t kForceFrameSize = 145;
inline constexpr std::size_t kFeedbackFrameSize = 42;
inline constexpr std::size_t kFeedbackFrameSizeWithEstimate = 52;

std::vector<std::uint8_t> encode(const Message& message);

/// Throws MalformedFrame on truncation, trailing bytes, bad magic, bad
/// version, unknown kind or an invalid finger.
Message decode(std::span<const std::uint8_t> bytes);

}  // namespace stiffbench
