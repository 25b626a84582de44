#include <doctest.h>

#include <chrono>
#include <thread>

#include "fuzz.hpp"
#include "helpers.hpp"
#include "stiffbench/error.hpp"
#include "stiffbench/protocol.hpp"
#include "stiffbench/session_log.hpp"
#include "stiffbench/transport.hpp"

using namespace stiffbench;
using namespace std::chrono_literals;

TEST_SUITE("protocol") {
    TEST_CASE("frame sizes") {
        CHECK(encode(PoseMessage{}).size() == kPoseFrameSize);
        CHECK(encode(ForceMessage{}).size() == kForceFrameSize);
        CHECK(encode(FeedbackMessage{}).size() == kFeedbackFrameSize);
        FeedbackMessage fb;
        fb.k_hat = StiffnessEstimate{};
        CHECK(encode(fb).size() == kFeedbackFrameSizeWithEstimate);
    }

    TEST_CASE("header bytes") {
        PoseMessage p;
        p.seq = 0x0102030405060708ULL;
        const auto bytes = encode(p);
        CHECK(bytes[0] == 'T');
        CHECK(bytes[1] == 'H');
        CHECK(bytes[2] == 'B');
        CHECK(bytes[3] == '1');
        CHECK(bytes[4] == static_cast<std::uint8_t>(MessageKind::Pose));
        CHECK(bytes[5] == 0x08);  // little-endian
        CHECK(bytes[12] == 0x01);
    }

    TEST_CASE("round trip of every kind") {
        PoseMessage p{7, 9, {Side::Leader, FingerName::Middle}, 3.25};
        CHECK(std::get<PoseMessage>(decode(encode(p))) == p);

        ForceMessage f;
        f.seq = 1;
        f.tick = 2;
        f.finger = {Side::Follower, FingerName::Ring};
        f.reading.finger = f.finger;
        f.reading.z_forces = {1.0, 2.0, 3.0, 4.0};
        f.reading.xy_forces[2] = {0.5, -0.5};
        f.f_aggregate = 4.0;
        f.dz_follower = 1.5;
        CHECK(std::get<ForceMessage>(decode(encode(f))) == f);

        FeedbackMessage fb;
        fb.finger = {Side::Leader, FingerName::Index};
        fb.rendered = {fb.finger, 1.25, 2.5};
        fb.k_hat = StiffnessEstimate{{Side::Follower, FingerName::Index}, 321.0};
        CHECK(std::get<FeedbackMessage>(decode(encode(fb))) == fb);
    }

    TEST_CASE("malformed frames are rejected") {
        auto good = encode(PoseMessage{});
        auto bad = good;
        bad[0] = 'X';
        CHECK_THROWS_AS(decode(bad), MalformedFrame);
        bad = good;
        bad[3] = '2';
        CHECK_THROWS_AS(decode(bad), MalformedFrame);
        bad = good;
        bad[4] = 9;
        CHECK_THROWS_AS(decode(bad), MalformedFrame);
        bad = good;
        bad.pop_back();
        CHECK_THROWS_AS(decode(bad), MalformedFrame);
        bad = good;
        bad.push_back(0);
        CHECK_THROWS_AS(decode(bad), MalformedFrame);
        bad = good;
        bad[22] = 3;  // leader ring finger
        CHECK_THROWS_AS(decode(bad), MalformedFrame);
        CHECK_THROWS_AS(decode(std::vector<std::uint8_t>{}), MalformedFrame);
    }

    TEST_CASE("fuzzed messages round-trip bit for bit") {
        Rng rng(2024);
        for (int i = 0; i < 10000; ++i) {
            const Message m = testing::random_message(rng);
            const auto bytes = encode(m);
            const auto again = encode(decode(bytes));
            REQUIRE(bytes == again);
        }
    }

    TEST_CASE("random bytes never crash the decoder") {
        Rng rng(77);
        int accepted = 0;
        for (int i = 0; i < 20000; ++i) {
            auto bytes = encode(testing::random_message(rng));
            const auto flips = 1 + rng.below(4);
            for (std::uint64_t j = 0; j < flips; ++j) bytes[rng.below(bytes.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
            if (rng.below(4) == 0) bytes.resize(rng.below(bytes.size() + 1));
            try {
                (void)decode(bytes);
                ++accepted;
            } catch (const MalformedFrame&) {
            }
        }
        CHECK(accepted > 0);  // payload-only flips still decode
    }
}

TEST_SUITE("transport") {
    TEST_CASE("in-process channel is FIFO") {
        InProcessChannel ch(4);
        for (std::uint64_t i = 0; i < 3; ++i) ch.send(PoseMessage{i, i, {}, 0.0});
        CHECK(ch.pending() == 3);
        for (std::uint64_t i = 0; i < 3; ++i) CHECK(seq_of(*ch.try_recv()) == i);
        CHECK_FALSE(ch.try_recv().has_value());
    }

    TEST_CASE("in-process channel across threads keeps order") {
        InProcessChannel ch(8);
        constexpr std::uint64_t n = 20000;
        std::thread producer([&] {
            for (std::uint64_t i = 0; i < n; ++i) ch.send(PoseMessage{i, 0, {}, 0.0});
        });
        std::uint64_t expect = 0;
        bool ordered = true;
        while (expect < n) {
            const Message m = ch.recv(2000ms);
            ordered = ordered && seq_of(m) == expect;
            ++expect;
        }
        producer.join();
        CHECK(ordered);
    }

    TEST_CASE("close and timeout") {
        InProcessChannel ch;
        CHECK_THROWS_AS(ch.recv(5ms), Timeout);
        ch.send(PoseMessage{});
        ch.close();
        CHECK(ch.try_recv().has_value());  // drains what was queued
        CHECK_THROWS_AS(ch.try_recv(), ChannelClosed);
        CHECK_THROWS_AS(ch.send(PoseMessage{}), ChannelClosed);
    }

    TEST_CASE("lossy channel drops deterministically") {
        auto count = [](std::uint64_t seed) {
            LossyChannel ch(std::make_unique<InProcessChannel>(4096), 0.3, seed);
            for (int i = 0; i < 2000; ++i) ch.send(PoseMessage{});
            return ch.dropped();
        };
        CHECK(count(1) == count(1));
        CHECK(count(1) > 450);
        CHECK(count(1) < 750);
        CHECK_THROWS_AS(LossyChannel(std::make_unique<InProcessChannel>(), 1.5, 1), InvalidArgument);
    }

    TEST_CASE("datagram channel round trip on loopback") {
        DatagramChannel a("127.0.0.1", 0);
        DatagramChannel b("127.0.0.1", 0);
        a.connect_peer("127.0.0.1", b.local_port());
        b.connect_peer("127.0.0.1", a.local_port());
        ForceMessage f;
        f.seq = 42;
        f.finger = {Side::Follower, FingerName::Index};
        f.reading.finger = f.finger;
        f.f_aggregate = 123.0;
        a.send(f);
        const Message got = b.recv(1000ms);
        CHECK(std::get<ForceMessage>(got) == f);
        CHECK_THROWS_AS(b.recv(10ms), Timeout);
    }
}

TEST_SUITE("session_log") {
    TEST_CASE("header then records, read back") {
        std::stringstream buf;
        SessionLogWriter w(buf);
        CHECK_THROWS_AS(w.append({{"type", "x"}}), Error);
        w.write_header({{"participant", "P01"}});
        w.append({{"type", "trial"}, {"correct", true}});
        w.flush();
        CHECK(w.records() == 1);
        const SessionLog log = read_session_log(buf);
        CHECK(log.header["participant"] == "P01");
        CHECK(log.header["format"] == std::string(kSessionLogFormat));
        REQUIRE(log.records.size() == 1);
        CHECK(log.records[0]["correct"] == true);
        CHECK(log_body(buf.str()) == "{\"correct\":true,\"type\":\"trial\"}\n");
    }

    TEST_CASE("foreign or broken logs are rejected") {
        std::stringstream a("{\"type\":\"trial\"}\n");
        CHECK_THROWS_AS(read_session_log(a), MalformedLog);
        std::stringstream b("not json\n");
        CHECK_THROWS_AS(read_session_log(b), MalformedLog);
        std::stringstream c("");
        CHECK_THROWS_AS(read_session_log(c), MalformedLog);
        CHECK_THROWS_AS(read_session_log_file("/nonexistent/x.jsonl"), IoError);
    }

    TEST_CASE("messages serialize with their kind") {
        const auto j = message_to_json(PoseMessage{3, 4, {Side::Leader, FingerName::Index}, 1.5});
        CHECK(j["type"] == "pose");
        CHECK(j["dz_leader"] == 1.5);
    }
}
