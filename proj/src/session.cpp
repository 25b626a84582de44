#include "stiffbench/session.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "stiffbench/error.hpp"
#include "stiffbench/transport.hpp"

namespace stiffbench {

using nlohmann::json;

void SqueezeProfile::validate() const {
    if (!(duration_s > 0.0)) throw InvalidArgument("squeeze duration must be positive");
    if (!(ramp_fraction > 0.0 && ramp_fraction <= 0.5)) throw InvalidArgument("ramp fraction must lie in (0, 0.5]");
    if (!(peak_fraction > 0.0 && peak_fraction <= 1.0)) throw InvalidArgument("peak fraction must lie in (0, 1]");
}

double SqueezeProfile::shape(std::size_t i, std::size_t n) const {
    if (n < 2) return 0.0;
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    return std::clamp(std::min(u, 1.0 - u) / ramp_fraction, 0.0, 1.0);
}

std::string_view transport_mode_name(TransportMode m) { return m == TransportMode::InProcess ? "inprocess" : "udp"; }

TransportMode parse_transport_mode(std::string_view text) {
    if (text == "inprocess") return TransportMode::InProcess;
    if (text == "udp") return TransportMode::Datagram;
    throw InvalidArgument("unknown transport '" + std::string(text) + "'");
}

std::string_view log_detail_name(LogDetail d) { return d == LogDetail::Summary ? "summary" : "full"; }

LogDetail parse_log_detail(std::string_view text) {
    if (text == "summary") return LogDetail::Summary;
    if (text == "full") return LogDetail::Full;
    throw InvalidArgument("unknown log detail '" + std::string(text) + "'");
}

void SessionConfig::validate() const {
    feedback.sensor.validate();
    if (!(feedback.f_leader_max > 0.0)) throw InvalidArgument("f_leader_max must be positive");
    if (!(feedback.epsilon_mm >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
    device.validate();
    squeeze.validate();
    if (!(noise.relative_sigma >= 0.0)) throw InvalidArgument("sensor noise must be non-negative");
    if (!(servo_stiffness > 0.0)) throw InvalidArgument("servo stiffness must be positive");
    if (!(grasp_variability >= 0.0)) throw InvalidArgument("grasp variability must be non-negative");
    if (!(geometry.contact_radius_mm > 0.0)) throw InvalidArgument("contact radius must be positive");
    if (!(tick_hz > 0.0)) throw InvalidArgument("tick rate must be positive");
    if (!(rest_s >= 0.0)) throw InvalidArgument("rest duration must be non-negative");
    if (tasks.empty()) throw InvalidArgument("no tasks configured");
    if (!samples.empty()) {
        if (samples.size() != 5) throw InvalidArgument("the sample set needs exactly five samples");
        for (int level = 1; level <= 5; ++level) {
            const auto& s = sample_at_level(samples, level);
            if (!(s.stiffness > 0.0)) throw InvalidArgument("sample stiffness must be positive");
            if (level > 1 && !(s.stiffness > sample_at_level(samples, level - 1).stiffness))
                throw InvalidArgument("sample stiffness must increase with level");
        }
    }
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) throw InvalidArgument("drop probability must lie in [0, 1]");
    if (!(stale_timeout_ms >= 0.0)) throw InvalidArgument("stale timeout must be non-negative");
    if (ticks_per_squeeze() < 2) throw InvalidArgument("a squeeze needs at least two ticks");
}

std::size_t SessionConfig::ticks_per_squeeze() const {
    return static_cast<std::size_t>(std::llround(squeeze.duration_s * tick_hz));
}

std::uint64_t SessionConfig::stale_timeout_ticks() const {
    return static_cast<std::uint64_t>(std::ceil(stale_timeout_ms * tick_hz / 1000.0 - 1e-9));
}

double full_squeeze_depth(const SampleSpec& sample, const SessionConfig& config) {
    double deepest = 0.0;
    for (const FingerId f : kLeaderFingers) {
        const double dz_l = config.squeeze.peak_fraction * config.device.range(f).leader_max_mm;
        const double cmd = leader_to_follower_displacement(dz_l, f, config.device);
        deepest = std::max(deepest, compliant_indentation(cmd, sample.stiffness, config.servo_stiffness));
    }
    return deepest;
}

SessionConfig SessionConfig::resolved() const {
    SessionConfig out = *this;
    if (auto_counts_per_newton) {
        const auto samples = sample_set();
        const SampleSpec& stiffest = *std::max_element(
            samples.begin(), samples.end(), [](const SampleSpec& a, const SampleSpec& b) { return a.stiffness < b.stiffness; });
        out.feedback.sensor.counts_per_newton =
            calibrate_counts_per_newton(stiffest, full_squeeze_depth(stiffest, out), out.feedback.sensor.f_max);
        out.auto_counts_per_newton = false;
    }
    return out;
}

std::vector<SampleSpec> SessionConfig::sample_set() const { return samples.empty() ? catalog(geometry) : samples; }

json to_json(const SessionConfig& c) {
    json tasks = json::array();
    for (Task t : c.tasks) tasks.push_back(task_name(t));
    json ranges = json::object();
    for (const FingerId f : kLeaderFingers) {
        const auto& r = c.device.range(f);
        ranges[std::string(finger_name(f.name))] = {{"leader_max_mm", r.leader_max_mm}, {"follower_max_mm", r.follower_max_mm}};
    }
    json samples = json::array();
    for (const auto& s : c.sample_set())
        samples.push_back({{"level", s.stiffness_level()}, {"material", s.material}, {"scale", scale_name(s.shore_scale)},
                           {"shore", s.shore_value}, {"stiffness", s.stiffness}});
    return {
        {"samples", samples},
        {"contact", {{"radius_mm", c.geometry.contact_radius_mm}, {"poisson_ratio", c.geometry.poisson_ratio},
                     {"oo_indenter_radius_mm", c.geometry.oo_indenter_radius_mm},
                     {"servo_stiffness", c.servo_stiffness}, {"grasp_variability", c.grasp_variability}}},
        {"sensor", {{"f_min", c.feedback.sensor.f_min}, {"f_max", c.feedback.sensor.f_max},
                    {"counts_per_newton", c.auto_counts_per_newton ? json("auto") : json(c.feedback.sensor.counts_per_newton)},
                    {"noise_sigma", c.noise.relative_sigma}}},
        {"feedback", {{"f_leader_max", c.feedback.f_leader_max}, {"clamp_output", c.feedback.clamp_output},
                      {"epsilon_mm", c.feedback.epsilon_mm}}},
        {"device", {{"mismatch", mismatch_kind_name(c.device.mismatch.kind)},
                    {"knee_leader", c.device.mismatch.knee_leader_fraction},
                    {"knee_follower", c.device.mismatch.knee_follower_fraction},
                    {"ranges", ranges}}},
        {"squeeze", {{"duration_s", c.squeeze.duration_s}, {"ramp_fraction", c.squeeze.ramp_fraction},
                     {"peak_fraction", c.squeeze.peak_fraction}}},
        {"timing", {{"tick_hz", c.tick_hz}, {"rest_s", c.rest_s}, {"stale_timeout_ms", c.stale_timeout_ms}}},
        {"session", {{"tasks", tasks}, {"practice", c.practice}, {"log_detail", log_detail_name(c.log_detail)},
                     {"elide_unused_traces", c.elide_unused_traces}}},
        {"transport", {{"mode", transport_mode_name(c.transport)}, {"host", c.host}, {"port", c.port},
                       {"drop_probability", c.drop_probability}}},
    };
}

bool score_answer(const Trial& trial, Choice answered) {
    const int chosen = answered == Choice::A ? trial.a : trial.b;
    const int other = answered == Choice::A ? trial.b : trial.a;
    if (trial.task == Task::ABX) return chosen == trial.x;
    return chosen < other;
}

std::vector<TrialResult> scored(const std::vector<TrialResult>& results, Task task) {
    std::vector<TrialResult> out;
    for (const auto& r : results)
        if (!r.trial.practice && r.trial.task == task) out.push_back(r);
    return out;
}

namespace {

// The four ends of the leader<->follower link.
struct Link {
    std::vector<std::unique_ptr<Channel>> owned;
    Channel* leader_out = nullptr;
    Channel* follower_in = nullptr;
    Channel* follower_out = nullptr;
    Channel* leader_in = nullptr;
    std::vector<LossyChannel*> lossy;

    [[nodiscard]] std::uint64_t dropped() const {
        std::uint64_t n = 0;
        for (const auto* l : lossy) n += l->dropped();
        return n;
    }
    void close() {
        for (auto& c : owned) c->close();
    }
};

Channel* maybe_lossy(Link& link, std::unique_ptr<Channel> inner, double p, std::uint64_t seed) {
    if (p > 0.0) {
        auto lossy = std::make_unique<LossyChannel>(std::move(inner), p, seed);
        link.lossy.push_back(lossy.get());
        inner = std::move(lossy);
    }
    link.owned.push_back(std::move(inner));
    return link.owned.back().get();
}

Link make_link(const SessionConfig& c, std::uint64_t seed) {
    Link link;
    if (c.transport == TransportMode::InProcess) {
        Channel* poses = maybe_lossy(link, std::make_unique<InProcessChannel>(), c.drop_probability,
                                     derive_seed(seed, "drop.pose"));
        Channel* forces = maybe_lossy(link, std::make_unique<InProcessChannel>(), c.drop_probability,
                                      derive_seed(seed, "drop.force"));
        link.leader_out = link.follower_in = poses;
        link.follower_out = link.leader_in = forces;
        return link;
    }
    auto follower = std::make_unique<DatagramChannel>(c.host, c.port);
    auto leader = std::make_unique<DatagramChannel>(c.host, 0);
    leader->connect_peer(c.host, follower->local_port());
    follower->connect_peer(c.host, leader->local_port());
    link.leader_out = link.leader_in =
        maybe_lossy(link, std::move(leader), c.drop_probability, derive_seed(seed, "drop.pose"));
    link.follower_out = link.follower_in =
        maybe_lossy(link, std::move(follower), c.drop_probability, derive_seed(seed, "drop.force"));
    return link;
}

json trial_json(const Trial& t) {
    json j{{"task", task_name(t.task)}, {"trial", t.index}, {"practice", t.practice},
           {"a", t.a}, {"b", t.b}};
    if (t.task == Task::ABX) j["x"] = t.x;
    j["distance"] = t.distance;
    j["direction"] = t.direction == Direction::Harder ? "up" : "down";
    return j;
}

class Engine {
public:
    Engine(const SessionInputs& in, SessionLogWriter* log)
        : in_(in),
          config_(in.config.resolved()),
          samples_(config_.sample_set()),
          observer_(in.observer, in.seed),
          grasp_(in.seed, "grasp"),
          log_(log),
          link_(make_link(config_, in.seed)),
          full_(config_.log_detail == LogDetail::Full),
          elide_(config_.elide_unused_traces && in.observer.pure_noise && !full_) {
        for (std::size_t i = 0; i < 3; ++i) {
            const FingerId f = kFollowerFingers[i];
            tips_.emplace_back(f, config_.feedback.sensor, config_.noise, derive_seed(in.seed, f.to_string()));
        }
        n_ticks_ = config_.ticks_per_squeeze();
        stale_ticks_ = config_.stale_timeout_ticks();
        forces_.reserve(3 * n_ticks_);
        z_.reserve(3 * n_ticks_);
    }

    ~Engine() { link_.close(); }
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    SessionOutcome run() {
        write_header();
        SessionOutcome out;
        try {
            for (Task task : config_.tasks) run_task(task, out);
        } catch (const SessionAborted&) {
            throw;
        } catch (const Error& e) {
            if (log_) {
                log_->append({{"type", "abort"}, {"reason", e.what()}, {"tick", tick_}});
                log_->flush();
            }
            throw SessionAborted(std::string("session aborted: ") + e.what());
        }
        out.ticks = tick_;
        out.dropped_messages = link_.dropped();
        if (log_) {
            log_->append({{"type", "end"}, {"ticks", tick_}, {"dropped_messages", out.dropped_messages}});
            log_->flush();
        }
        return out;
    }

private:
    void write_header() {
        if (!log_) return;
        json tasks = json::array();
        for (Task t : config_.tasks) tasks.push_back(task_name(t));
        json header{
            {"participant", in_.participant},
            {"group", in_.group},
            {"day", in_.day},
            {"method", method_number(in_.method)},
            {"seed", in_.seed},
            {"tasks", tasks},
            {"observer", {{"weber_fraction", in_.observer.weber_fraction}, {"lapse_rate", in_.observer.lapse_rate},
                          {"pure_noise", in_.observer.pure_noise}}},
            {"config", to_json(config_)},
            {"schedule", schedule_to_csv(in_.schedule)},
        };
        header.update(in_.header_extra);
        log_->write_header(std::move(header));
    }

    void run_task(Task task, SessionOutcome& out) {
        const TrialSchedule schedule = with_task(in_.schedule, task);
        if (config_.practice) {
            for (const Trial& t : practice_trials(task)) out.results.push_back(run_trial(t, false));
        }
        const auto order = randomize_presentation(schedule, derive_seed(in_.seed, task_name(task)));
        for (std::size_t i = 0; i < schedule.trials.size(); ++i) {
            const Trial& t = schedule.trials[i];
            out.results.push_back(run_trial(t, order[i].b_first));
            const auto& rest = TrialSchedule::kRestAfter;
            if (std::find(rest.begin(), rest.end(), t.index) != rest.end() && i + 1 < schedule.trials.size())
                run_rest(task, t.index);
        }
    }

    void run_rest(Task task, int after) {
        const auto span = static_cast<std::uint64_t>(std::llround(config_.rest_s * config_.tick_hz));
        if (log_)
            log_->append({{"type", "rest"}, {"task", task_name(task)}, {"after_trial", after},
                          {"duration_s", config_.rest_s}, {"first_tick", tick_}, {"last_tick", tick_ + span}});
        tick_ += span;
    }

    TrialResult run_trial(const Trial& trial, bool b_first) {
        TrialResult r;
        r.trial = trial;
        r.b_first = b_first;
        std::string roles = b_first ? "BA" : "AB";
        if (trial.task == Task::ABX) roles += 'X';
        double k_a = 0.0, k_b = 0.0, k_x = 0.0;
        for (char role : roles) {
            const int level = role == 'A' ? trial.a : role == 'B' ? trial.b : trial.x;
            PhaseTrace phase = present(sample_at_level(samples_, level), role, trial);
            (role == 'A' ? k_a : role == 'B' ? k_b : k_x) = phase.percept;
            r.phases.push_back(phase);
        }
        r.answered = trial.task == Task::ABX ? observer_.answer_abx(k_a, k_b, k_x) : observer_.answer_softer(k_a, k_b);
        r.correct = score_answer(trial, r.answered);
        if (log_) {
            json j = trial_json(trial);
            j["type"] = "trial";
            if (const auto p = pair_index(trial.a, trial.b, trial.x))
                j["pair"] = *p;
            j["b_first"] = b_first;
            j["answer"] = choice_name(r.answered);
            j["correct"] = r.correct;
            log_->append(j);
        }
        return r;
    }

    // One squeeze of one stimulus through the full leader/follower loop.
    PhaseTrace present(SampleSpec sample, char role, const Trial& trial) {
        PhaseTrace ph;
        ph.role = role;
        ph.level = sample.stiffness_level();
        ph.first_tick = tick_;
        if (config_.grasp_variability > 0.0) {
            double n = grasp_.normal();
            while (std::abs(n) > 2.0) n = grasp_.normal();  // truncated: a grasp always makes contact
            ph.contact_scale = std::exp(config_.grasp_variability * n);
            sample.stiffness *= ph.contact_scale;
        }
        if (elide_) {
            tick_ += n_ticks_;
            ph.last_tick = tick_ - 1;
            ph.simulated = false;
            ph.percept = observer_.perceive_stiffness({}, {});
            log_presentation(ph, trial);
            return ph;
        }
        forces_.clear();
        z_.clear();
        for (auto& tip : tips_) tip.begin_contact();
        latest_ = {};
        double k_sum = 0.0;
        std::size_t k_count = 0;

        for (std::size_t i = 0; i < n_ticks_; ++i, ++tick_) {
            const double shape = config_.squeeze.shape(i, n_ticks_);
            std::array<double, 3> dz_l{};
            for (std::size_t s = 0; s < 3; ++s) {
                dz_l[s] = shape * config_.squeeze.peak_fraction * config_.device.ranges[s].leader_max_mm;
                PoseMessage pose{pose_seq_[s]++, tick_, kLeaderFingers[s], dz_l[s]};
                if (full_) log_->append(message_to_json(pose));
                link_.leader_out->send(pose);
            }
            follower_step(sample);
            while (auto m = link_.leader_in->try_recv()) {
                if (const auto* f = std::get_if<ForceMessage>(&*m)) latest_[finger_slot(f->finger)] = *f;
            }
            for (std::size_t s = 0; s < 3; ++s) {
                const FingerId leader = kLeaderFingers[s];
                FeedbackMessage fb;
                fb.seq = feedback_seq_[s]++;
                fb.tick = tick_;
                fb.finger = leader;
                fb.rendered.finger = leader;
                const auto& held = latest_[s];
                if (held && tick_ - held->tick <= stale_ticks_) {
                    const double dz_then = held->tick == tick_ ? dz_l[s] : leader_dz(s, held->tick - ph.first_tick);
                    const RenderResult rr = render(leader, held->f_aggregate, {dz_then, held->dz_follower},
                                                   config_.device, config_.feedback);
                    fb.rendered = rr.force;
                    fb.k_hat = rr.k_hat;
                    if (rr.k_hat) {
                        k_sum += rr.k_hat->k_hat;
                        ++k_count;
                    }
                } else {
                    ++ph.stale_ticks;
                }
                const double rendered = in_.method == FeedbackMethod::Force ? fb.rendered.method1 : fb.rendered.method2;
                if (!(rendered > 0.0)) ++ph.gated_ticks;
                forces_.push_back(rendered);
                z_.push_back(dz_l[s]);
                if (full_) log_->append(message_to_json(fb));
            }
        }
        ph.last_tick = tick_ - 1;
        ph.mean_k_hat = k_count ? k_sum / static_cast<double>(k_count) : 0.0;
        ph.percept = observer_.perceive_stiffness(forces_, z_);
        log_presentation(ph, trial);
        return ph;
    }

    void log_presentation(const PhaseTrace& ph, const Trial& trial) {
        if (!log_) return;
        json j{{"type", "presentation"}, {"task", task_name(trial.task)}, {"trial", trial.index},
               {"practice", trial.practice}, {"role", std::string(1, ph.role)}, {"level", ph.level},
               {"first_tick", ph.first_tick}, {"last_tick", ph.last_tick}, {"contact_scale", ph.contact_scale},
               {"percept", ph.percept}};
        if (ph.simulated) {
            j["gated_ticks"] = ph.gated_ticks;
            j["stale_ticks"] = ph.stale_ticks;
            j["mean_k_hat"] = ph.mean_k_hat;
        } else {
            j["simulated"] = false;
        }
        log_->append(j);
    }

    [[nodiscard]] double leader_dz(std::size_t slot, std::uint64_t i) const {
        return config_.squeeze.shape(i, n_ticks_) * config_.squeeze.peak_fraction *
               config_.device.ranges[slot].leader_max_mm;
    }

    void follower_step(const SampleSpec& sample) {
        while (auto m = link_.follower_in->try_recv()) {
            const auto* pose = std::get_if<PoseMessage>(&*m);
            if (!pose) continue;
            const FingerId f = map_finger(pose->finger);
            const std::size_t s = finger_slot(f);
            const double cmd = leader_to_follower_displacement(pose->dz_leader, pose->finger, config_.device);
            const double depth = compliant_indentation(cmd, sample.stiffness, config_.servo_stiffness);
            ForceMessage fm;
            fm.seq = force_seq_[s]++;
            fm.tick = pose->tick;
            fm.finger = f;
            fm.reading = tips_[s].press(sample, depth, pose->tick);
            fm.f_aggregate = clip_to_range(aggregate_max(fm.reading), config_.feedback.sensor);
            fm.dz_follower = depth;
            if (full_) log_->append(message_to_json(fm));
            link_.follower_out->send(fm);
        }
    }

    const SessionInputs& in_;
    SessionConfig config_;
    std::vector<SampleSpec> samples_;
    Observer observer_;
    Rng grasp_;
    SessionLogWriter* log_;
    Link link_;
    bool full_;
    bool elide_;
    std::vector<TactileFingertip> tips_;
    std::size_t n_ticks_ = 0;
    std::uint64_t stale_ticks_ = 0;
    std::uint64_t tick_ = 0;
    std::array<std::uint64_t, 3> pose_seq_{}, force_seq_{}, feedback_seq_{};
    std::array<std::optional<ForceMessage>, 3> latest_{};
    std::vector<double> forces_, z_;
};

}  // namespace

SessionOutcome run_session(const SessionInputs& inputs, SessionLogWriter* log) {
    inputs.config.validate();
    inputs.observer.validate();
    if (inputs.config.log_detail == LogDetail::Full && !log)
        throw InvalidArgument("full log detail requested without a log");
    Engine engine(inputs, log);
    return engine.run();
}

}  // namespace stiffbench
