#include "stiffbench/observer.hpp"

#include <cmath>

#include "stiffbench/error.hpp"

namespace stiffbench {

std::string_view choice_name(Choice c) { return c == Choice::A ? "A" : "B"; }

void PerceptualModel::validate() const {
    if (!(weber_fraction >= 0.0)) throw InvalidArgument("Weber fraction must be non-negative");
    if (!(lapse_rate >= 0.0 && lapse_rate <= 0.1)) throw InvalidArgument("lapse rate must lie in [0, 0.1]");
}

double percept_slope(std::span<const double> rendered_force, std::span<const double> leader_displacement) {
    if (rendered_force.size() != leader_displacement.size())
        throw InvalidArgument("force and displacement traces differ in length");
    double sfz = 0.0;
    double szz = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < rendered_force.size(); ++i) {
        if (!(rendered_force[i] > 0.0)) continue;
        const double z = leader_displacement[i];
        sfz += rendered_force[i] * z;
        szz += z * z;
        ++used;
    }
    if (used == 0 || !(szz > 0.0)) throw NoContactPercept();
    return sfz / szz;
}

Observer::Observer(PerceptualModel model, std::uint64_t seed) : model_(model), rng_(seed, "observer") {
    model_.validate();
}

double Observer::perceive_stiffness(std::span<const double> rendered_force,
                                    std::span<const double> leader_displacement) {
    if (model_.pure_noise) return rng_.normal();
    const double base = percept_slope(rendered_force, leader_displacement);
    if (model_.weber_fraction == 0.0) return base;
    return base * (1.0 + model_.weber_fraction * rng_.normal());
}

Choice Observer::decide(double score_a, double score_b) {
    // The lapse draw is always consumed so the stream does not depend on the stimuli.
    const bool lapse = rng_.uniform() < model_.lapse_rate;
    if (lapse || score_a == score_b) return rng_.coin() ? Choice::A : Choice::B;
    return score_a < score_b ? Choice::A : Choice::B;
}

Choice Observer::answer_abx(double k_a, double k_b, double k_x) {
    return decide(std::abs(k_x - k_a), std::abs(k_x - k_b));
}

Choice Observer::answer_softer(double k_a, double k_b) { return decide(k_a, k_b); }

}  // namespace stiffbench
