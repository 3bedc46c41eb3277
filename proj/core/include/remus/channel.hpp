#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "remus/spatial.hpp"
#include "remus/ultrasound_types.hpp"

namespace remus {

enum class MessageKind : uint8_t {
  PoseCmd = 1,
  ForceFb = 2,
  FrameMeta = 3,
};

struct PoseCmdPayload {
  Pose pose;
};

struct ForceFbPayload {
  Vec3 force = Vec3::Zero();
};

struct FrameMetaPayload {
  uint64_t frame_id = 0;
  VesselMeasure measure;
};

// One message on the simulated data channel. seq is strictly increasing
// per sender, timestamp is the sender's logical clock at send time.
struct ChannelMessage {
  uint32_t seq = 0;
  uint64_t timestamp_us = 0;
  MessageKind kind = MessageKind::PoseCmd;
  std::variant<PoseCmdPayload, ForceFbPayload, FrameMetaPayload> payload;
};

// Bit-exact little-endian wire format:
//   magic 0x55 0x53, u8 kind, u32 seq, u64 timestamp, payload f64s in
//   declared field order. See README for the payload layouts.
std::vector<uint8_t> encode(const ChannelMessage& msg);
ChannelMessage decode(const uint8_t* data, size_t len);  // throws MalformedMessageError
ChannelMessage decode(const std::vector<uint8_t>& bytes);

// One-way delivery delay law: Gaussian truncated at zero. The sample
// for a given seq is a pure function of (seed, seq).
struct LatencyModel {
  double one_way_mean_us = 2500.0;
  double one_way_std_us = 2000.0;
  uint64_t seed = 0;

  double sample_us(uint32_t seq) const;
};

// Byte transport between a pair of endpoints. Implementations must be
// reliable and ordered; latency is simulated above this layer.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send_frame(const std::vector<uint8_t>& bytes) = 0;
  virtual std::vector<std::vector<uint8_t>> drain() = 0;
};

// Endpoint of a bidirectional channel. Owns outgoing seq numbering and
// the delivery-time-ordered inbox of its peer direction.
class ChannelEndpoint {
 public:
  ChannelEndpoint(std::shared_ptr<Transport> out, std::shared_ptr<Transport> in,
                  LatencyModel latency)
      : out_(std::move(out)), in_(std::move(in)), latency_(latency) {}

  // Stamps seq/timestamp, encodes, and hands the bytes to the transport.
  // Delivery is scheduled at send-time + latency sample, clamped so the
  // channel stays FIFO.
  ChannelMessage send(MessageKind kind,
                      std::variant<PoseCmdPayload, ForceFbPayload, FrameMetaPayload> payload,
                      const SimClock& clock);

  // All messages whose delivery time has arrived, in delivery order.
  std::vector<ChannelMessage> poll(const SimClock& clock);

  uint32_t next_seq() const { return next_seq_; }

 private:
  struct Scheduled {
    uint64_t delivery_us;
    ChannelMessage msg;
  };

  void ingest(const SimClock& clock);

  std::shared_ptr<Transport> out_;
  std::shared_ptr<Transport> in_;
  LatencyModel latency_;
  uint32_t next_seq_ = 0;
  uint64_t last_send_us_ = 0;
  uint64_t last_delivery_us_ = 0;
  std::deque<Scheduled> inbox_;
};

// A bidirectional channel: endpoint a (expert side) and b (follower side).
struct ChannelPair {
  std::shared_ptr<ChannelEndpoint> a;
  std::shared_ptr<ChannelEndpoint> b;
};

// In-process transport (default).
ChannelPair make_inproc_channel(const LatencyModel& a_to_b, const LatencyModel& b_to_a);

// Real loopback TCP transport carrying the same wire format with a
// 4-byte little-endian length prefix per message. Both endpoints live in
// this process; the sockets are the byte path.
ChannelPair make_tcp_channel(uint16_t port, const LatencyModel& a_to_b,
                             const LatencyModel& b_to_a);

}  // namespace remus
