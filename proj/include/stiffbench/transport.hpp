#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stiffbench/protocol.hpp"
#include "stiffbench/rng.hpp"

namespace stiffbench {

/// One-directional message link between the leader and follower nodes.
///
/// Implementations are safe for one producer thread and one consumer thread.
class Channel {
public:
    virtual ~Channel() = default;

    /// Throws ChannelClosed after close().
    virtual void send(const Message& message) = 0;

    /// Next message if one is ready. Throws ChannelClosed once closed and drained.
    virtual std::optional<Message> try_recv() = 0;

    /// Blocks up to `timeout`; throws Timeout or ChannelClosed.
    virtual Message recv(std::chrono::milliseconds timeout) = 0;

    virtual void close() = 0;
};

/// FIFO ring inside one process. Never drops.
///
/// Lock-free for exactly one producer and one consumer. A full ring makes
/// send() wait for the consumer, so single-threaded callers must drain
/// before they outrun the capacity.
class InProcessChannel final : public Channel {
public:
    explicit InProcessChannel(std::size_t capacity = 1024);

    void send(const Message& message) override;
    std::optional<Message> try_recv() override;
    Message recv(std::chrono::milliseconds timeout) override;
    void close() override;

    [[nodiscard]] std::size_t pending() const;

private:
    std::vector<Message> slots_;
    std::size_t mask_;
    alignas(64) std::atomic<std::size_t> head_{0};  // next slot to read
    alignas(64) std::atomic<std::size_t> tail_{0};  // next slot to write
    std::atomic<bool> closed_{false};
};

/// UDP socket carrying encoded frames. Datagrams may be lost; malformed
/// frames are counted and skipped.
class DatagramChannel final : public Channel {
public:
    /// Binds host:port (port 0 picks an ephemeral port).
    DatagramChannel(const std::string& host, std::uint16_t port);
    ~DatagramChannel() override;

    DatagramChannel(const DatagramChannel&) = delete;
    DatagramChannel& operator=(const DatagramChannel&) = delete;

    void connect_peer(const std::string& host, std::uint16_t port);
    [[nodiscard]] std::uint16_t local_port() const { return local_port_; }
    [[nodiscard]] std::uint64_t malformed_frames() const { return malformed_; }

    void send(const Message& message) override;
    std::optional<Message> try_recv() override;
    Message recv(std::chrono::milliseconds timeout) override;
    void close() override;

private:
    int fd_ = -1;
    std::uint16_t local_port_ = 0;
    bool has_peer_ = false;
    bool closed_ = false;
    std::uint64_t malformed_ = 0;
    unsigned char peer_[16]{};  // sockaddr_in storage
};

/// Wraps a channel and silently drops each sent message with probability p.
class LossyChannel final : public Channel {
public:
    LossyChannel(std::unique_ptr<Channel> inner, double drop_probability, std::uint64_t seed);

    void send(const Message& message) override;
    std::optional<Message> try_recv() override { return inner_->try_recv(); }
    Message recv(std::chrono::milliseconds timeout) override { return inner_->recv(timeout); }
    void close() override { inner_->close(); }

    [[nodiscard]] std::uint64_t dropped() const { return dropped_; }

private:
    std::unique_ptr<Channel> inner_;
    double drop_probability_;
    Rng rng_;
    std::uint64_t dropped_ = 0;
};

}  // namespace stiffbench
