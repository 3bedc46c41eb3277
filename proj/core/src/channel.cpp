#include "remus/channel.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>

#include "remus/errors.hpp"
#include "remus/rng.hpp"

namespace remus {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<uint8_t>& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

uint32_t get_u32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
  return v;
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const uint8_t* p) {
  const uint64_t bits = get_u64(p);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

constexpr uint8_t kMagic0 = 0x55;
constexpr uint8_t kMagic1 = 0x53;
constexpr size_t kHeaderSize = 2 + 1 + 4 + 8;

size_t payload_size(MessageKind kind) {
  switch (kind) {
    case MessageKind::PoseCmd:
      return 7 * 8;
    case MessageKind::ForceFb:
      return 3 * 8;
    case MessageKind::FrameMeta:
      return 7 * 8;
  }
  return 0;
}

}  // namespace

std::vector<uint8_t> encode(const ChannelMessage& msg) {
  std::vector<uint8_t> out;
  out.reserve(kHeaderSize + payload_size(msg.kind));
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(static_cast<uint8_t>(msg.kind));
  put_u32(out, msg.seq);
  put_u64(out, msg.timestamp_us);
  switch (msg.kind) {
    case MessageKind::PoseCmd: {
      const Pose& p = std::get<PoseCmdPayload>(msg.payload).pose;
      put_f64(out, p.position.x());
      put_f64(out, p.position.y());
      put_f64(out, p.position.z());
      put_f64(out, p.orientation.w());
      put_f64(out, p.orientation.x());
      put_f64(out, p.orientation.y());
      put_f64(out, p.orientation.z());
      break;
    }
    case MessageKind::ForceFb: {
      const Vec3& f = std::get<ForceFbPayload>(msg.payload).force;
      put_f64(out, f.x());
      put_f64(out, f.y());
      put_f64(out, f.z());
      break;
    }
    case MessageKind::FrameMeta: {
      const auto& fm = std::get<FrameMetaPayload>(msg.payload);
      put_f64(out, static_cast<double>(fm.frame_id));
      put_f64(out, fm.measure.centroid_x);
      put_f64(out, fm.measure.centroid_y);
      put_f64(out, fm.measure.w);
      put_f64(out, fm.measure.h);
      put_f64(out, fm.measure.e);
      put_f64(out, fm.measure.found ? 1.0 : 0.0);
      break;
    }
  }
  return out;
}

ChannelMessage decode(const uint8_t* data, size_t len) {
  if (len < kHeaderSize) throw MalformedMessageError("message shorter than header");
  if (data[0] != kMagic0 || data[1] != kMagic1) throw MalformedMessageError("bad magic");
  const uint8_t kind_byte = data[2];
  if (kind_byte < 1 || kind_byte > 3) throw MalformedMessageError("unknown message kind");
  ChannelMessage msg;
  msg.kind = static_cast<MessageKind>(kind_byte);
  msg.seq = get_u32(data + 3);
  msg.timestamp_us = get_u64(data + 7);
  if (len != kHeaderSize + payload_size(msg.kind)) {
    throw MalformedMessageError("message length does not match kind");
  }
  const uint8_t* p = data + kHeaderSize;
  switch (msg.kind) {
    case MessageKind::PoseCmd: {
      PoseCmdPayload pc;
      pc.pose.position = Vec3(get_f64(p), get_f64(p + 8), get_f64(p + 16));
      pc.pose.orientation =
          Quat(get_f64(p + 24), get_f64(p + 32), get_f64(p + 40), get_f64(p + 48));
      msg.payload = pc;
      break;
    }
    case MessageKind::ForceFb: {
      ForceFbPayload fb;
      fb.force = Vec3(get_f64(p), get_f64(p + 8), get_f64(p + 16));
      msg.payload = fb;
      break;
    }
    case MessageKind::FrameMeta: {
      FrameMetaPayload fm;
      fm.frame_id = static_cast<uint64_t>(get_f64(p));
      fm.measure.centroid_x = get_f64(p + 8);
      fm.measure.centroid_y = get_f64(p + 16);
      fm.measure.w = get_f64(p + 24);
      fm.measure.h = get_f64(p + 32);
      fm.measure.e = get_f64(p + 40);
      fm.measure.found = get_f64(p + 48) != 0.0;
      msg.payload = fm;
      break;
    }
  }
  return msg;
}

ChannelMessage decode(const std::vector<uint8_t>& bytes) { return decode(bytes.data(), bytes.size()); }

double LatencyModel::sample_us(uint32_t seq) const {
  // One Box-Muller draw keyed by (seed, seq): the schedule never depends
  // on call order.
  uint64_t s = mix_seed(seed, seq);
  const uint64_t w1 = splitmix64(s);
  const uint64_t w2 = splitmix64(s);
  double u1 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double gauss = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  return std::max(0.0, one_way_mean_us + one_way_std_us * gauss);
}

ChannelMessage ChannelEndpoint::send(
    MessageKind kind, std::variant<PoseCmdPayload, ForceFbPayload, FrameMetaPayload> payload,
    const SimClock& clock) {
  ChannelMessage msg;
  msg.kind = kind;
  msg.payload = std::move(payload);
  msg.seq = next_seq_++;
  msg.timestamp_us = std::max(clock.now_us(), last_send_us_);
  last_send_us_ = msg.timestamp_us;
  out_->send_frame(encode(msg));
  return msg;
}

void ChannelEndpoint::ingest(const SimClock& clock) {
  (void)clock;
  for (const auto& frame : in_->drain()) {
    ChannelMessage msg = decode(frame);
    uint64_t delivery =
        msg.timestamp_us + static_cast<uint64_t>(std::llround(latency_.sample_us(msg.seq)));
    // FIFO clamp: an ordered-reliable channel never reorders.
    delivery = std::max(delivery, last_delivery_us_);
    last_delivery_us_ = delivery;
    inbox_.push_back({delivery, std::move(msg)});
  }
}

std::vector<ChannelMessage> ChannelEndpoint::poll(const SimClock& clock) {
  ingest(clock);
  std::vector<ChannelMessage> out;
  while (!inbox_.empty() && inbox_.front().delivery_us <= clock.now_us()) {
    out.push_back(std::move(inbox_.front().msg));
    inbox_.pop_front();
  }
  return out;
}

namespace {

class InprocTransport : public Transport {
 public:
  void send_frame(const std::vector<uint8_t>& bytes) override { frames_.push_back(bytes); }

  std::vector<std::vector<uint8_t>> drain() override {
    std::vector<std::vector<uint8_t>> out(frames_.begin(), frames_.end());
    frames_.clear();
    return out;
  }

 private:
  std::deque<std::vector<uint8_t>> frames_;
};

// Loopback TCP byte path. Frames carry a u32 little-endian length prefix
// before each encoded message. A shared in-flight counter lets drain()
// wait for bytes already written by the in-process peer, which keeps
// delivery deterministic.
class TcpTransport : public Transport {
 public:
  TcpTransport(int fd, std::shared_ptr<std::atomic<int64_t>> sent,
               std::shared_ptr<std::atomic<int64_t>> pending)
      : fd_(fd), sent_(std::move(sent)), pending_(std::move(pending)) {}

  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send_frame(const std::vector<uint8_t>& bytes) override {
    std::vector<uint8_t> framed;
    framed.reserve(4 + bytes.size());
    const uint32_t n = static_cast<uint32_t>(bytes.size());
    for (int i = 0; i < 4; ++i) framed.push_back(static_cast<uint8_t>(n >> (8 * i)));
    framed.insert(framed.end(), bytes.begin(), bytes.end());
    size_t off = 0;
    while (off < framed.size()) {
      const ssize_t w = ::send(fd_, framed.data() + off, framed.size() - off, 0);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw Error("tcp transport send failed");
      }
      off += static_cast<size_t>(w);
    }
    sent_->fetch_add(1);
  }

  std::vector<std::vector<uint8_t>> drain() override {
    std::vector<std::vector<uint8_t>> frames;
    // Keep reading until every frame the in-process peer has written is
    // in hand, so logical delivery order never depends on socket timing.
    while (true) {
      pump(frames);
      if (pending_->load() == 0) break;
      struct pollfd pfd{fd_, POLLIN, 0};
      ::poll(&pfd, 1, 100);
    }
    return frames;
  }

 private:
  void pump(std::vector<std::vector<uint8_t>>& frames) {
    uint8_t chunk[4096];
    while (true) {
      const ssize_t r = ::recv(fd_, chunk, sizeof(chunk), MSG_DONTWAIT);
      if (r > 0) {
        buffer_.insert(buffer_.end(), chunk, chunk + r);
        continue;
      }
      if (r < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) break;
      if (r < 0 && errno == EINTR) continue;
      break;  // peer closed
    }
    size_t off = 0;
    while (buffer_.size() - off >= 4) {
      uint32_t n = 0;
      for (int i = 0; i < 4; ++i) n |= static_cast<uint32_t>(buffer_[off + i]) << (8 * i);
      if (buffer_.size() - off - 4 < n) break;
      frames.emplace_back(buffer_.begin() + off + 4, buffer_.begin() + off + 4 + n);
      off += 4 + n;
      pending_->fetch_sub(1);
    }
    buffer_.erase(buffer_.begin(), buffer_.begin() + off);
  }

  int fd_;
  std::shared_ptr<std::atomic<int64_t>> sent_;     // frames this side wrote
  std::shared_ptr<std::atomic<int64_t>> pending_;  // frames the peer wrote, not yet parsed
  std::vector<uint8_t> buffer_;
};

}  // namespace

ChannelPair make_inproc_channel(const LatencyModel& a_to_b, const LatencyModel& b_to_a) {
  auto ab = std::make_shared<InprocTransport>();
  auto ba = std::make_shared<InprocTransport>();
  ChannelPair pair;
  pair.a = std::make_shared<ChannelEndpoint>(ab, ba, b_to_a);
  pair.b = std::make_shared<ChannelEndpoint>(ba, ab, a_to_b);
  return pair;
}

ChannelPair make_tcp_channel(uint16_t port, const LatencyModel& a_to_b,
                             const LatencyModel& b_to_a) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw Error("cannot create tcp listener");
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(listener);
    throw Error("cannot bind tcp loopback port " + std::to_string(port));
  }
  socklen_t addr_len = sizeof(addr);
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &addr_len);
  if (::listen(listener, 1) < 0) {
    ::close(listener);
    throw Error("cannot listen on tcp loopback");
  }
  const int client = ::socket(AF_INET, SOCK_STREAM, 0);
  if (client < 0 || ::connect(client, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(listener);
    if (client >= 0) ::close(client);
    throw Error("cannot connect tcp loopback");
  }
  const int server = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (server < 0) {
    ::close(client);
    throw Error("tcp loopback accept failed");
  }
  ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  ::setsockopt(server, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  auto inflight_ab = std::make_shared<std::atomic<int64_t>>(0);
  auto inflight_ba = std::make_shared<std::atomic<int64_t>>(0);
  auto side_a = std::make_shared<TcpTransport>(client, inflight_ab, inflight_ba);
  auto side_b = std::make_shared<TcpTransport>(server, inflight_ba, inflight_ab);

  ChannelPair pair;
  pair.a = std::make_shared<ChannelEndpoint>(side_a, side_a, b_to_a);
  pair.b = std::make_shared<ChannelEndpoint>(side_b, side_b, a_to_b);
  return pair;
}

}  // namespace remus
