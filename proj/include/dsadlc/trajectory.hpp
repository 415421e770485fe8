#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsadlc/errors.hpp"

// In-memory trajectory model. All coordinates are canonical: +x is the
// direction of travel and +y points to the driver's left, regardless of the
// carriageway the track was recorded on. x/y refer to the vehicle's
// front-center.

namespace dsadlc {

enum class VehicleClass { Car, Truck };
enum class DrivingDirection { Increasing, Decreasing };

struct TrackFrame {
  std::int64_t frame_index = 0;
  int vehicle_id = 0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  int lane_id = 0;
  double space_headway = 0.0;  // 0 when no preceding vehicle
  double time_headway = 0.0;   // 0 when no preceding vehicle
  // Neighbor ids as carried by the dataset; 0 encodes "absent".
  int preceding_id = 0;
  int following_id = 0;
  int left_preceding_id = 0;
  int left_alongside_id = 0;
  int left_following_id = 0;
  int right_preceding_id = 0;
  int right_alongside_id = 0;
  int right_following_id = 0;

  bool operator==(const TrackFrame&) const = default;
};

struct VehicleTrack {
  int vehicle_id = 0;
  VehicleClass vehicle_class = VehicleClass::Car;
  DrivingDirection driving_direction = DrivingDirection::Increasing;
  double width = 2.0;   // lateral extent, meters
  double length = 4.5;  // longitudinal extent, meters
  std::vector<TrackFrame> frames;

  bool operator==(const VehicleTrack&) const = default;

  std::int64_t first_frame() const { return frames.front().frame_index; }
  std::int64_t last_frame() const { return frames.back().frame_index; }

  bool has_frame(std::int64_t frame_index) const {
    return !frames.empty() && frame_index >= first_frame() &&
           frame_index <= last_frame();
  }

  // Frames are contiguous, so lookup is an offset.
  const TrackFrame& at_frame(std::int64_t frame_index) const {
    if (!has_frame(frame_index)) {
      throw NotFound("vehicle " + std::to_string(vehicle_id) +
                     " has no frame " + std::to_string(frame_index));
    }
    return frames[static_cast<std::size_t>(frame_index - first_frame())];
  }
};

struct Lane {
  int id = 0;
  bool merge = false;  // on-ramp / merge lane

  bool operator==(const Lane&) const = default;
};

// Lanes of one driving direction, ordered left-to-right in travel direction.
struct LaneSet {
  std::vector<Lane> lanes;

  bool operator==(const LaneSet&) const = default;

  bool contains(int lane_id) const { return index_of(lane_id) >= 0; }

  int index_of(int lane_id) const {
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      if (lanes[i].id == lane_id) return static_cast<int>(i);
    }
    return -1;
  }

  std::optional<int> left_of(int lane_id) const {
    int i = index_of(lane_id);
    if (i <= 0) return std::nullopt;
    return lanes[static_cast<std::size_t>(i) - 1].id;
  }

  std::optional<int> right_of(int lane_id) const {
    int i = index_of(lane_id);
    if (i < 0 || i + 1 >= static_cast<int>(lanes.size())) return std::nullopt;
    return lanes[static_cast<std::size_t>(i) + 1].id;
  }

  bool is_merge(int lane_id) const {
    int i = index_of(lane_id);
    return i >= 0 && lanes[static_cast<std::size_t>(i)].merge;
  }
};

struct NeighborSet {
  std::optional<int> p;    // preceding, same lane
  std::optional<int> pl;   // preceding, left lane
  std::optional<int> pr;   // preceding, right lane
  std::optional<int> fl;   // following, left lane
  std::optional<int> fr;   // following, right lane
  std::optional<int> asl;  // alongside, left lane
  std::optional<int> asr;  // alongside, right lane

  bool operator==(const NeighborSet&) const = default;
};

class Recording {
 public:
  int recording_id = 0;
  double frame_rate = 25.0;  // Hz
  std::optional<double> speed_limit;  // m/s
  LaneSet upper_lanes;  // DrivingDirection::Decreasing
  LaneSet lower_lanes;  // DrivingDirection::Increasing
  std::vector<VehicleTrack> tracks;
  // True when the source dataset carries adjacent-lane neighbor ids; then
  // those ids are authoritative. Otherwise roles are computed geometrically.
  bool neighbor_ids_populated = false;

  const LaneSet& lanes_for(DrivingDirection d) const {
    return d == DrivingDirection::Decreasing ? upper_lanes : lower_lanes;
  }

  bool has_lane(DrivingDirection d, int lane_id) const {
    return lanes_for(d).contains(lane_id);
  }

  // Builds the id and per-frame occupancy indexes. Call once after all
  // tracks are in place; the recording is immutable afterwards.
  void finalize() {
    track_by_id_.clear();
    occupancy_.clear();
    min_frame_ = std::numeric_limits<std::int64_t>::max();
    max_frame_ = std::numeric_limits<std::int64_t>::min();
    for (const auto& t : tracks) {
      if (t.frames.empty()) continue;
      min_frame_ = std::min(min_frame_, t.first_frame());
      max_frame_ = std::max(max_frame_, t.last_frame());
    }
    if (max_frame_ < min_frame_) {  // no frames at all
      min_frame_ = 0;
      max_frame_ = -1;
    }
    occupancy_.assign(
        static_cast<std::size_t>(std::max<std::int64_t>(0, max_frame_ - min_frame_ + 1)),
        {});
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
      track_by_id_[tracks[ti].vehicle_id] = ti;
      for (const auto& f : tracks[ti].frames) {
        occupancy_[static_cast<std::size_t>(f.frame_index - min_frame_)]
            .push_back(static_cast<std::uint32_t>(ti));
      }
    }
  }

  const VehicleTrack* find_track(int vehicle_id) const {
    auto it = track_by_id_.find(vehicle_id);
    return it == track_by_id_.end() ? nullptr : &tracks[it->second];
  }

  const VehicleTrack& track(int vehicle_id) const {
    const VehicleTrack* t = find_track(vehicle_id);
    if (!t) throw NotFound("unknown vehicle id " + std::to_string(vehicle_id));
    return *t;
  }

  // Indexes of tracks that have a frame at frame_index.
  std::span<const std::uint32_t> tracks_at(std::int64_t frame_index) const {
    if (frame_index < min_frame_ || frame_index > max_frame_) return {};
    return occupancy_[static_cast<std::size_t>(frame_index - min_frame_)];
  }

 private:
  std::unordered_map<int, std::size_t> track_by_id_;
  std::vector<std::vector<std::uint32_t>> occupancy_;
  std::int64_t min_frame_ = 0;
  std::int64_t max_frame_ = -1;
};

// Contiguous sub-trajectory view ending at a given frame.
struct TrajectoryWindow {
  std::span<const TrackFrame> frames;
  double frame_rate = 25.0;

  std::int64_t end_frame() const { return frames.back().frame_index; }
};

inline std::int64_t window_frame_count(double duration_s, double frame_rate) {
  return std::llround(duration_s * frame_rate);
}

inline TrajectoryWindow window(std::span<const TrackFrame> frames,
                               double frame_rate, std::int64_t end_frame,
                               double duration_s) {
  const std::int64_t n = window_frame_count(duration_s, frame_rate);
  if (frames.empty() || end_frame < frames.front().frame_index ||
      end_frame > frames.back().frame_index) {
    throw NotFound("end frame " + std::to_string(end_frame) +
                   " is outside the track");
  }
  const std::int64_t pos = end_frame - frames.front().frame_index;
  if (pos + 1 < n) {
    throw WindowUnderrun("window needs " + std::to_string(n) +
                         " frames ending at " + std::to_string(end_frame) +
                         " but only " + std::to_string(pos + 1) +
                         " are available");
  }
  return TrajectoryWindow{
      frames.subspan(static_cast<std::size_t>(pos + 1 - n),
                     static_cast<std::size_t>(n)),
      frame_rate};
}

inline TrajectoryWindow window(const VehicleTrack& track, double frame_rate,
                               std::int64_t end_frame, double duration_s) {
  return window(std::span<const TrackFrame>(track.frames), frame_rate,
                end_frame, duration_s);
}

inline TrajectoryWindow window(const TrajectoryWindow& w,
                               std::int64_t end_frame, double duration_s) {
  return window(w.frames, w.frame_rate, end_frame, duration_s);
}

namespace detail {

// Longitudinal body interval [rear, front] of a vehicle at a frame; x is the
// front-center.
inline bool bodies_overlap(double ego_x, double ego_len, double other_x,
                           double other_len) {
  return other_x >= ego_x - ego_len && other_x - other_len <= ego_x;
}

struct NearestSlot {
  double distance = 0.0;
  int id = 0;
  bool set = false;

  void offer(double d, int id_in) {
    if (!set || d < distance || (d == distance && id_in < id)) {
      distance = d;
      id = id_in;
      set = true;
    }
  }

  std::optional<int> value() const {
    return set ? std::optional<int>(id) : std::nullopt;
  }
};

}  // namespace detail

inline std::optional<int> opt_id(int raw) {
  return raw == 0 ? std::nullopt : std::optional<int>(raw);
}

// Resolves the seven surrounding-vehicle roles for the ego at one frame.
// Dataset-provided ids win when the recording carries them; the geometric
// fallback scans every same-direction vehicle present at the frame.
inline NeighborSet neighbors(const Recording& rec, int ego_id,
                             std::int64_t frame_index) {
  const VehicleTrack& ego = rec.track(ego_id);
  const TrackFrame& ef = ego.at_frame(frame_index);

  if (rec.neighbor_ids_populated) {
    NeighborSet n;
    n.p = opt_id(ef.preceding_id);
    n.pl = opt_id(ef.left_preceding_id);
    n.pr = opt_id(ef.right_preceding_id);
    n.fl = opt_id(ef.left_following_id);
    n.fr = opt_id(ef.right_following_id);
    n.asl = opt_id(ef.left_alongside_id);
    n.asr = opt_id(ef.right_alongside_id);
    return n;
  }

  const LaneSet& lanes = rec.lanes_for(ego.driving_direction);
  const std::optional<int> left_lane = lanes.left_of(ef.lane_id);
  const std::optional<int> right_lane = lanes.right_of(ef.lane_id);

  detail::NearestSlot p, pl, pr, fl, fr, asl, asr;
  for (std::uint32_t ti : rec.tracks_at(frame_index)) {
    const VehicleTrack& other = rec.tracks[ti];
    if (other.vehicle_id == ego_id) continue;
    if (other.driving_direction != ego.driving_direction) continue;
    const TrackFrame& of = other.at_frame(frame_index);

    if (of.lane_id == ef.lane_id) {
      if (of.x > ef.x) p.offer(of.x - ef.x, other.vehicle_id);
      continue;
    }
    const bool on_left = left_lane && of.lane_id == *left_lane;
    const bool on_right = right_lane && of.lane_id == *right_lane;
    if (!on_left && !on_right) continue;

    if (detail::bodies_overlap(ef.x, ego.length, of.x, other.length)) {
      (on_left ? asl : asr).offer(std::abs(of.x - ef.x), other.vehicle_id);
    } else if (of.x > ef.x) {
      (on_left ? pl : pr).offer(of.x - ef.x, other.vehicle_id);
    } else {
      (on_left ? fl : fr).offer(ef.x - of.x, other.vehicle_id);
    }
  }

  NeighborSet n;
  n.p = p.value();
  n.pl = pl.value();
  n.pr = pr.value();
  n.fl = fl.value();
  n.fr = fr.value();
  n.asl = asl.value();
  n.asr = asr.value();
  return n;
}

}  // namespace dsadlc
