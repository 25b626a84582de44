#include "stiffbench/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <thread>

#include "stiffbench/error.hpp"

namespace stiffbench {

// ---------------------------------------------------------------------------
// InProcessChannel

InProcessChannel::InProcessChannel(std::size_t capacity) {
    std::size_t n = 2;
    while (n < capacity) n <<= 1;
    slots_.resize(n);
    mask_ = n - 1;
}

void InProcessChannel::send(const Message& message) {
    const std::size_t tail = tail_.load(std::memory_order_relaxed);
    while (tail - head_.load(std::memory_order_acquire) > mask_) {
        if (closed_.load(std::memory_order_acquire)) throw ChannelClosed();
        std::this_thread::yield();
    }
    if (closed_.load(std::memory_order_acquire)) throw ChannelClosed();
    slots_[tail & mask_] = message;
    tail_.store(tail + 1, std::memory_order_release);
}

std::optional<Message> InProcessChannel::try_recv() {
    const std::size_t head = head_.load(std::memory_order_relaxed);
    if (head == tail_.load(std::memory_order_acquire)) {
        if (closed_.load(std::memory_order_acquire) && head == tail_.load(std::memory_order_acquire))
            throw ChannelClosed();
        return std::nullopt;
    }
    Message m = std::move(slots_[head & mask_]);
    head_.store(head + 1, std::memory_order_release);
    return m;
}

Message InProcessChannel::recv(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        if (auto m = try_recv()) return std::move(*m);
        if (std::chrono::steady_clock::now() >= deadline) throw Timeout();
        std::this_thread::yield();
    }
}

void InProcessChannel::close() { closed_.store(true, std::memory_order_release); }

std::size_t InProcessChannel::pending() const {
    return tail_.load(std::memory_order_acquire) - head_.load(std::memory_order_acquire);
}

// ---------------------------------------------------------------------------
// DatagramChannel

namespace {

sockaddr_in make_address(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    const std::string h = host == "localhost" ? "127.0.0.1" : host;
    if (::inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1)
        throw InvalidArgument("not an IPv4 address: " + host);
    return addr;
}

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

static_assert(sizeof(sockaddr_in) <= 16);

DatagramChannel::DatagramChannel(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw Error(errno_text("socket"));
    const sockaddr_in addr = make_address(host, port);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        const std::string msg = errno_text("bind");
        ::close(fd_);
        throw Error(msg);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    local_port_ = ntohs(bound.sin_port);
}

DatagramChannel::~DatagramChannel() {
    if (fd_ >= 0) ::close(fd_);
}

void DatagramChannel::connect_peer(const std::string& host, std::uint16_t port) {
    const sockaddr_in addr = make_address(host, port);
    std::memcpy(peer_, &addr, sizeof(addr));
    has_peer_ = true;
}

void DatagramChannel::send(const Message& message) {
    if (closed_) throw ChannelClosed();
    if (!has_peer_) throw Error("datagram channel has no peer");
    const auto frame = encode(message);
    // Best effort: a failed send is indistinguishable from a dropped datagram.
    (void)::sendto(fd_, frame.data(), frame.size(), 0, reinterpret_cast<const sockaddr*>(peer_),
                   sizeof(sockaddr_in));
}

std::optional<Message> DatagramChannel::try_recv() {
    if (closed_) throw ChannelClosed();
    std::array<std::uint8_t, 512> buf{};
    while (true) {
        const ssize_t n = ::recv(fd_, buf.data(), buf.size(), MSG_DONTWAIT);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK) return std::nullopt;
            if (errno == EINTR) continue;
            throw Error(errno_text("recv"));
        }
        try {
            return decode(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
        } catch (const MalformedFrame&) {
            ++malformed_;
        }
    }
}

Message DatagramChannel::recv(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        if (auto m = try_recv()) return *m;
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) throw Timeout();
        pollfd p{fd_, POLLIN, 0};
        ::poll(&p, 1, static_cast<int>(left.count()));
    }
}

void DatagramChannel::close() { closed_ = true; }

// ---------------------------------------------------------------------------
// LossyChannel

LossyChannel::LossyChannel(std::unique_ptr<Channel> inner, double drop_probability, std::uint64_t seed)
    : inner_(std::move(inner)), drop_probability_(drop_probability), rng_(seed, "channel-loss") {
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
        throw InvalidArgument("drop probability must lie in [0, 1]");
}

void LossyChannel::send(const Message& message) {
    if (rng_.uniform() < drop_probability_) {
        ++dropped_;
        return;
    }
    inner_->send(message);
}

}  // namespace stiffbench
