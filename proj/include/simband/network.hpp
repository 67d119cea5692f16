// Copyright 2026 The simband Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIMBAND_NETWORK_HPP_
#define SIMBAND_NETWORK_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace simband {

// Four message-processing nodes joined in a ring by four transport channels;
// channel c connects nodes (c, c mod 4 + 1) for c = 1..4. Messages for an
// origin-destination pair follow the fewest-hop route, ties broken toward the
// lower-index first channel. Node storage is unlimited; a channel holds at
// most `channel_capacity_bits` in-flight bits and a message that does not fit
// waits at its sending node in the channel's FIFO queue. Crossing channel c
// takes l/transmit_bits_per_s + length_miles[c]/speed_miles_per_s seconds and
// every node on the path (source and destination included) spends
// `processing_s` per message, one message at a time.
struct NetworkParams {
  double processing_s = 1e-3;
  double channel_capacity_bits = 275000.0;
  double transmit_bits_per_s = 275000.0;
  double speed_miles_per_s = 150000.0;
  std::array<double, 4> channel_length_miles{100.0, 200.0, 300.0, 400.0};
  int deliveries_target = 30;

  void validate() const {
    if (!(processing_s >= 0) || !(channel_capacity_bits > 0) ||
        !(transmit_bits_per_s > 0) || !(speed_miles_per_s > 0) ||
        deliveries_target < 1) {
      throw std::invalid_argument("NetworkParams: malformed parameter table");
    }
    for (double l : channel_length_miles) {
      if (!(l >= 0)) throw std::invalid_argument("NetworkParams: negative channel length");
    }
  }
};

constexpr int kNetworkNodes = 4;
constexpr int kNetworkStreams = 12;  // ordered pairs (i,j), i != j, lexicographic

struct NetworkOdPair {
  int from;  // 1-based node ids
  int to;
  double rate;  // messages per second
};

// True arrival rates for each ordered pair, row-major over the rate table.
inline const std::array<NetworkOdPair, kNetworkStreams>& network_od_pairs() {
  static const std::array<NetworkOdPair, kNetworkStreams> pairs = {{
      {1, 2, 40}, {1, 3, 30}, {1, 4, 35},
      {2, 1, 50}, {2, 3, 45}, {2, 4, 15},
      {3, 1, 60}, {3, 2, 15}, {3, 4, 20},
      {4, 1, 25}, {4, 2, 30}, {4, 3, 40},
  }};
  return pairs;
}

struct NetworkRoute {
  std::vector<int> nodes;     // visited nodes, source first, destination last
  std::vector<int> channels;  // 1-based channel ids, one per hop
};

// Frozen routing table on the ring. Opposite nodes have two 2-hop routes;
// the one whose first channel has the lower index wins.
inline const NetworkRoute& network_route(int from, int to) {
  static const auto table = [] {
    std::array<std::array<NetworkRoute, kNetworkNodes + 1>, kNetworkNodes + 1> t{};
    auto set = [&t](int a, int b, std::vector<int> nodes, std::vector<int> channels) {
      t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          NetworkRoute{std::move(nodes), std::move(channels)};
    };
    set(1, 2, {1, 2}, {1});
    set(1, 3, {1, 2, 3}, {1, 2});
    set(1, 4, {1, 4}, {4});
    set(2, 1, {2, 1}, {1});
    set(2, 3, {2, 3}, {2});
    set(2, 4, {2, 1, 4}, {1, 4});
    set(3, 1, {3, 2, 1}, {2, 1});
    set(3, 2, {3, 2}, {2});
    set(3, 4, {3, 4}, {3});
    set(4, 1, {4, 1}, {4});
    set(4, 2, {4, 3, 2}, {3, 2});
    set(4, 3, {4, 3}, {3});
    return t;
  }();
  if (from < 1 || from > kNetworkNodes || to < 1 || to > kNetworkNodes || from == to) {
    throw std::invalid_argument("network_route: invalid node pair");
  }
  return table[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
}

struct NetworkRun {
  double mean_delay = 0.0;
  std::vector<double> delays;          // first `deliveries_target`, delivery order
  std::vector<double> min_path_costs;  // zero-queueing cost of the same messages
};

namespace detail {

struct NetworkEvent {
  double time;
  std::uint64_t seq;  // schedule order breaks time ties deterministically
  int kind;           // 0 = external arrival, 1 = node service done, 2 = transit done
  int where;          // node id or channel id
  int msg;
  bool operator>(const NetworkEvent& o) const {
    if (time != o.time) return time > o.time;
    return seq > o.seq;
  }
};

}  // namespace detail

// Event-driven run over explicit interarrival streams (one per ordered node
// pair) and message lengths assigned in global arrival order. Returns the
// delays of the first `deliveries_target` delivered messages.
inline NetworkRun network_run(const NetworkParams& params,
                              std::span<const std::vector<double>> interarrivals,
                              std::span<const double> lengths) {
  params.validate();
  if (interarrivals.size() != kNetworkStreams) {
    throw std::invalid_argument("network_run: expected 12 interarrival streams");
  }

  struct Message {
    int od;
    double arrival_time;
    double length;
    int hop = 0;
    double delivered = -1.0;
  };

  // Arrival times per stream, merged into the global entering order.
  std::vector<Message> msgs;
  for (int s = 0; s < kNetworkStreams; ++s) {
    double t = 0.0;
    for (double gap : interarrivals[static_cast<std::size_t>(s)]) {
      if (!(gap >= 0) || !std::isfinite(gap)) {
        throw std::invalid_argument("network_run: interarrival times must be >= 0");
      }
      t += gap;
      msgs.push_back(Message{s, t, 0.0});
    }
  }
  std::stable_sort(msgs.begin(), msgs.end(), [](const Message& a, const Message& b) {
    if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
    return a.od < b.od;
  });
  if (lengths.size() < msgs.size()) {
    throw std::invalid_argument("network_run: fewer lengths than messages");
  }
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (!(lengths[i] >= 0) || !std::isfinite(lengths[i])) {
      throw std::invalid_argument("network_run: message lengths must be >= 0");
    }
    msgs[i].length = lengths[i];
  }

  struct Node {
    std::deque<int> fifo;
    bool busy = false;
  };
  struct Channel {
    double free_bits;
    std::deque<int> waiting;
  };
  std::array<Node, kNetworkNodes + 1> nodes{};
  std::array<Channel, kNetworkNodes + 1> channels{};
  for (int c = 1; c <= kNetworkNodes; ++c) {
    channels[static_cast<std::size_t>(c)].free_bits = params.channel_capacity_bits;
  }

  std::priority_queue<detail::NetworkEvent, std::vector<detail::NetworkEvent>,
                      std::greater<detail::NetworkEvent>>
      events;
  std::uint64_t seq = 0;
  auto schedule = [&](double time, int kind, int where, int msg) {
    events.push(detail::NetworkEvent{time, seq++, kind, where, msg});
  };

  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const auto& od = network_od_pairs()[static_cast<std::size_t>(msgs[i].od)];
    schedule(msgs[i].arrival_time, 0, od.from, static_cast<int>(i));
  }

  auto node_accept = [&](int node_id, int m, double now) {
    Node& node = nodes[static_cast<std::size_t>(node_id)];
    node.fifo.push_back(m);
    if (!node.busy) {
      node.busy = true;
      schedule(now + params.processing_s, 1, node_id, node.fifo.front());
    }
  };
  auto channel_time = [&](int channel_id, double length) {
    return length / params.transmit_bits_per_s +
           params.channel_length_miles[static_cast<std::size_t>(channel_id - 1)] /
               params.speed_miles_per_s;
  };
  auto try_start_transit = [&](int channel_id, int m, double now) {
    Channel& ch = channels[static_cast<std::size_t>(channel_id)];
    if (ch.free_bits >= msgs[static_cast<std::size_t>(m)].length) {
      ch.free_bits -= msgs[static_cast<std::size_t>(m)].length;
      schedule(now + channel_time(channel_id, msgs[static_cast<std::size_t>(m)].length), 2,
               channel_id, m);
      return true;
    }
    return false;
  };

  int delivered = 0;
  NetworkRun result;
  while (!events.empty() && delivered < params.deliveries_target) {
    const auto ev = events.top();
    events.pop();
    Message& m = msgs[static_cast<std::size_t>(ev.msg)];
    const auto& route =
        network_route(network_od_pairs()[static_cast<std::size_t>(m.od)].from,
                      network_od_pairs()[static_cast<std::size_t>(m.od)].to);
    switch (ev.kind) {
      case 0: {  // external arrival at the source node
        node_accept(ev.where, ev.msg, ev.time);
        break;
      }
      case 1: {  // node finished processing the head message
        Node& node = nodes[static_cast<std::size_t>(ev.where)];
        node.fifo.pop_front();
        if (!node.fifo.empty()) {
          schedule(ev.time + params.processing_s, 1, ev.where, node.fifo.front());
        } else {
          node.busy = false;
        }
        if (ev.where == route.nodes.back()) {
          m.delivered = ev.time;
          ++delivered;
          result.delays.push_back(ev.time - m.arrival_time);
          double cost = params.processing_s * static_cast<double>(route.nodes.size());
          for (int c : route.channels) cost += channel_time(c, m.length);
          result.min_path_costs.push_back(cost);
        } else {
          const int channel_id = route.channels[static_cast<std::size_t>(m.hop)];
          if (!try_start_transit(channel_id, ev.msg, ev.time)) {
            channels[static_cast<std::size_t>(channel_id)].waiting.push_back(ev.msg);
          }
        }
        break;
      }
      case 2: {  // message crossed a channel
        Channel& ch = channels[static_cast<std::size_t>(ev.where)];
        ch.free_bits += m.length;
        ++m.hop;
        node_accept(route.nodes[static_cast<std::size_t>(m.hop)], ev.msg, ev.time);
        // Admit queued messages in FIFO order while they fit.
        while (!ch.waiting.empty() &&
               try_start_transit(ev.where, ch.waiting.front(), ev.time)) {
          ch.waiting.pop_front();
        }
        break;
      }
      default:
        break;
    }
  }

  if (delivered < params.deliveries_target) {
    throw std::runtime_error(
        "network_run: insufficient draws, only " + std::to_string(delivered) + " of " +
        std::to_string(params.deliveries_target) + " deliveries completed");
  }
  double sum = 0.0;
  for (double d : result.delays) sum += d;
  result.mean_delay = sum / static_cast<double>(result.delays.size());
  return result;
}

constexpr int kNetworkArrivalDraws = 40;   // interarrival draws per stream
constexpr int kNetworkLengthDraws = 480;   // one length per potential message

// Fixed-draw-count wrapper: 12 streams of 40 interarrivals followed by 480
// message lengths, averaged over the first 30 deliveries. Surplus draws are
// consumed but unused once the 30th delivery occurs.
inline double network_output(std::span<const double> draws,
                             const NetworkParams& params = NetworkParams{}) {
  const std::size_t expected =
      static_cast<std::size_t>(kNetworkStreams) * kNetworkArrivalDraws + kNetworkLengthDraws;
  if (draws.size() != expected) {
    throw std::invalid_argument("network_output: expected " + std::to_string(expected) +
                                " draws");
  }
  std::vector<std::vector<double>> streams(kNetworkStreams);
  std::size_t pos = 0;
  for (int s = 0; s < kNetworkStreams; ++s) {
    streams[static_cast<std::size_t>(s)].assign(draws.begin() + static_cast<long>(pos),
                                                draws.begin() + static_cast<long>(pos) +
                                                    kNetworkArrivalDraws);
    pos += kNetworkArrivalDraws;
  }
  std::vector<double> lengths(draws.begin() + static_cast<long>(pos), draws.end());
  return network_run(params, streams, lengths).mean_delay;
}

}  // namespace simband

#endif  // SIMBAND_NETWORK_HPP_
