#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "stiffbench/rng.hpp"

namespace stiffbench {

enum class Choice : std::uint8_t { A, B };

std::string_view choice_name(Choice c);

/// Parameters of the virtual participant.
///
/// With weber_fraction = 0 and lapse_rate = 0 the observer is ideal and
/// deterministic. pure_noise replaces every percept with a draw that does
/// not depend on the stimulus (the limit of an unbounded Weber fraction).
struct PerceptualModel {
    double weber_fraction = 0.17;
    double lapse_rate = 0.02;
    bool pure_noise = false;

    void validate() const;
};

/// Least-squares slope through the origin of rendered force (N) against
/// leader displacement (mm), over ticks where the rendered force is non-zero.
/// Throws NoContactPercept if every tick is gated.
double percept_slope(std::span<const double> rendered_force, std::span<const double> leader_displacement);

/// Virtual participant. Owns its generator; one instance per session.
class Observer {
public:
    Observer(PerceptualModel model, std::uint64_t seed);

    /// Noisy stiffness percept: slope * (1 + w * N(0,1)).
    double perceive_stiffness(std::span<const double> rendered_force, std::span<const double> leader_displacement);

    /// Which of A and B the reference X matches: the nearer percept.
    Choice answer_abx(double k_a, double k_b, double k_x);

    /// Which of A and B is softer: the smaller percept.
    Choice answer_softer(double k_a, double k_b);

    [[nodiscard]] const PerceptualModel& model() const { return model_; }

private:
    Choice decide(double score_a, double score_b);

    PerceptualModel model_;
    Rng rng_;
};

}  // namespace stiffbench
