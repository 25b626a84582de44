#include "stiffbench/protocol.hpp"

#include <bit>
#include <string>

#include "stiffbench/error.hpp"

namespace stiffbench {

namespace {

class Writer {
public:
    explicit Writer(std::size_t reserve) { buf_.reserve(reserve); }

    void u8(std::uint8_t v) { buf_.push_back(v); }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void finger(FingerId f) {
        u8(static_cast<std::uint8_t>(f.side));
        u8(static_cast<std::uint8_t>(f.name));
    }

    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    FingerId finger() {
        const std::uint8_t side = u8();
        const std::uint8_t name = u8();
        if (side > 1 || name > 3) throw MalformedFrame("finger field out of range");
        FingerId f{static_cast<Side>(side), static_cast<FingerName>(name)};
        if (!f.valid()) throw MalformedFrame("finger not valid for its side");
        return f;
    }

    void finish() const {
        if (pos_ != bytes_.size()) throw MalformedFrame("trailing bytes after frame");
    }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw MalformedFrame("truncated frame");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void write_header(Writer& w, MessageKind kind, std::uint64_t seq, std::uint64_t tick, FingerId finger) {
    w.u8('T');
    w.u8('H');
    w.u8('B');
    w.u8('1');
    w.u8(static_cast<std::uint8_t>(kind));
    w.u64(seq);
    w.u64(tick);
    w.finger(finger);
}

}  // namespace

MessageKind kind_of(const Message& m) {
    return std::visit(
        [](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, PoseMessage>) return MessageKind::Pose;
            else if constexpr (std::is_same_v<T, ForceMessage>) return MessageKind::Force;
            else return MessageKind::Feedback;
        },
        m);
}

FingerId finger_of(const Message& m) {
    return std::visit([](const auto& msg) { return msg.finger; }, m);
}

std::uint64_t seq_of(const Message& m) {
    return std::visit([](const auto& msg) { return msg.seq; }, m);
}

std::vector<std::uint8_t> encode(const Message& message) {
    return std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoseMessage>) {
                Writer w(kPoseFrameSize);
                write_header(w, MessageKind::Pose, m.seq, m.tick, m.finger);
                w.f64(m.dz_leader);
                return w.take();
            } else if constexpr (std::is_same_v<T, ForceMessage>) {
                Writer w(kForceFrameSize);
                write_header(w, MessageKind::Force, m.seq, m.tick, m.finger);
                w.finger(m.reading.finger);
                w.u64(m.reading.timestamp);
                for (double z : m.reading.z_forces) w.f64(z);
                for (const auto& xy : m.reading.xy_forces) {
                    w.f64(xy[0]);
                    w.f64(xy[1]);
                }
                w.f64(m.f_aggregate);
                w.f64(m.dz_follower);
                return w.take();
            } else {
                Writer w(kFeedbackFrameSizeWithEstimate);
                write_header(w, MessageKind::Feedback, m.seq, m.tick, m.finger);
                w.finger(m.rendered.finger);
                w.f64(m.rendered.method1);
                w.f64(m.rendered.method2);
                w.u8(m.k_hat ? 1 : 0);
                if (m.k_hat) {
                    w.finger(m.k_hat->finger);
                    w.f64(m.k_hat->k_hat);
                }
                return w.take();
            }
        },
        message);
}

Message decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 5) throw MalformedFrame("truncated frame");
    if (bytes[0] != 'T' || bytes[1] != 'H' || bytes[2] != 'B') throw MalformedFrame("bad magic");
    if (bytes[3] != '1') throw MalformedFrame("unsupported frame version");

    Reader r(bytes.subspan(4));
    const std::uint8_t kind = r.u8();
    const std::uint64_t seq = r.u64();
    const std::uint64_t tick = r.u64();
    const FingerId finger = r.finger();

    switch (static_cast<MessageKind>(kind)) {
        case MessageKind::Pose: {
            PoseMessage m{seq, tick, finger, r.f64()};
            r.finish();
            return m;
        }
        case MessageKind::Force: {
            ForceMessage m;
            m.seq = seq;
            m.tick = tick;
            m.finger = finger;
            m.reading.finger = r.finger();
            m.reading.timestamp = r.u64();
            for (double& z : m.reading.z_forces) z = r.f64();
            for (auto& xy : m.reading.xy_forces) {
                xy[0] = r.f64();
                xy[1] = r.f64();
            }
            m.f_aggregate = r.f64();
            m.dz_follower = r.f64();
            r.finish();
            return m;
        }
        case MessageKind::Feedback: {
            FeedbackMessage m;
            m.seq = seq;
            m.tick = tick;
            m.finger = finger;
            m.rendered.finger = r.finger();
            m.rendered.method1 = r.f64();
            m.rendered.method2 = r.f64();
            const std::uint8_t has_k = r.u8();
            if (has_k > 1) throw MalformedFrame("bad optional flag");
            if (has_k) {
                StiffnessEstimate k;
                k.finger = r.finger();
                k.k_hat = r.f64();
                m.k_hat = k;
            }
            r.finish();
            return m;
        }
    }
    throw MalformedFrame("unknown message kind " + std::to_string(kind));
}

}  // namespace stiffbench
