#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dsadlc/csv.hpp"
#include "dsadlc/errors.hpp"
#include "dsadlc/trajectory.hpp"

// Reads and writes recordings in the documented highD-style layout:
//   <prefix>_recordingMeta.csv  id,frameRate,speedLimit,upperLaneMarkings,
//                               lowerLaneMarkings[,mergeLanes]
//   <prefix>_tracksMeta.csv     id,class,drivingDirection,numFrames
//   <prefix>_tracks.csv         frame,id,x,y,width,height,xVelocity,
//                               yVelocity,xAcceleration,yAcceleration,dhw,
//                               thw,ttc,precedingId,followingId,
//                               leftPrecedingId,leftAlongsideId,
//                               leftFollowingId,rightPrecedingId,
//                               rightAlongsideId,rightFollowingId,laneId
//
// File coordinates follow the drone-image convention (x right, y down,
// meters); the loader converts to the canonical travel-direction frame and
// the writer converts back. The "width"/"height" track columns are the
// bounding-box extents along x/y, i.e. vehicle length and width. Absent
// neighbors are encoded as id 0. drivingDirection: 1 = upper carriageway
// (decreasing x), 2 = lower (increasing x). speedLimit is m/s, -1 = none.

namespace dsadlc {

struct RecordingPaths {
  std::string recording_meta;
  std::string tracks_meta;
  std::string tracks;
};

struct DatasetManifest {
  std::string root;
  std::vector<RecordingPaths> entries;
};

// Lane geometry carried by the recording-meta file. Marking y values are in
// the file (image) convention, ascending. Lane ids are derived: upper lanes
// get 2..m_u, lower lanes get m_u+2.., where m_u is the upper marking count.
struct LaneGeometry {
  std::vector<double> upper_marking_y;
  std::vector<double> lower_marking_y;
  std::vector<int> merge_lane_ids;

  bool operator==(const LaneGeometry&) const = default;

  int lower_first_id() const {
    return static_cast<int>(upper_marking_y.size()) + 2;
  }

  LaneSet upper_lanes() const {
    LaneSet s;
    const int n = static_cast<int>(upper_marking_y.size()) - 1;
    // leftmost upper lane (in travel direction) is the one nearest the
    // median, i.e. the highest id
    for (int i = n; i >= 1; --i) s.lanes.push_back({i + 1, is_merge(i + 1)});
    return s;
  }

  LaneSet lower_lanes() const {
    LaneSet s;
    const int n = static_cast<int>(lower_marking_y.size()) - 1;
    const int first = lower_first_id();
    for (int i = 0; i < n; ++i) s.lanes.push_back({first + i, is_merge(first + i)});
    return s;
  }

  bool is_merge(int lane_id) const {
    return std::find(merge_lane_ids.begin(), merge_lane_ids.end(), lane_id) !=
           merge_lane_ids.end();
  }

  // Canonical (+y = left of travel) lane center for a lane id, if the id is
  // backed by marking geometry.
  std::optional<double> canonical_center_y(DrivingDirection dir, int lane_id) const {
    if (dir == DrivingDirection::Decreasing) {
      const int i = lane_id - 2;
      if (i < 0 || i + 1 >= static_cast<int>(upper_marking_y.size())) return std::nullopt;
      return 0.5 * (upper_marking_y[static_cast<std::size_t>(i)] +
                    upper_marking_y[static_cast<std::size_t>(i) + 1]);
    }
    const int i = lane_id - lower_first_id();
    if (i < 0 || i + 1 >= static_cast<int>(lower_marking_y.size())) return std::nullopt;
    return -0.5 * (lower_marking_y[static_cast<std::size_t>(i)] +
                   lower_marking_y[static_cast<std::size_t>(i) + 1]);
  }
};

namespace detail {

inline std::vector<double> parse_marking_list(const std::string& s,
                                              const std::string& context) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (auto part : csv::split(s, ';')) out.push_back(csv::parse_double(part, context));
  if (!std::is_sorted(out.begin(), out.end())) {
    throw SchemaError("lane markings not ascending in " + context);
  }
  return out;
}

inline std::string join_doubles(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ';';
    s += csv::format_double(xs[i]);
  }
  return s;
}

inline std::string join_ints(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(xs[i]);
  }
  return s;
}

// canonical <-> file frame. The transform is its own inverse.
inline void flip_to_direction_frame(TrackFrame& f, DrivingDirection dir) {
  if (dir == DrivingDirection::Decreasing) {
    f.x = -f.x;
    f.vx = -f.vx;
    f.ax = -f.ax;
  } else {
    f.y = -f.y;
    f.vy = -f.vy;
    f.ay = -f.ay;
  }
}

}  // namespace detail

struct RecordingData {
  Recording recording;
  LaneGeometry geometry;
};

inline RecordingData load_recording(const RecordingPaths& paths) {
  // recording meta
  const csv::Table meta = csv::read_file(paths.recording_meta);
  const int c_id = meta.require_column("id", paths.recording_meta);
  const int c_rate = meta.require_column("frameRate", paths.recording_meta);
  const int c_limit = meta.require_column("speedLimit", paths.recording_meta);
  const int c_upper = meta.require_column("upperLaneMarkings", paths.recording_meta);
  const int c_lower = meta.require_column("lowerLaneMarkings", paths.recording_meta);
  const int c_merge = meta.column("mergeLanes");  // optional
  if (meta.rows.size() != 1) {
    throw SchemaError("expected exactly one row in " + paths.recording_meta);
  }
  const auto& mrow = meta.rows[0];

  Recording rec;
  LaneGeometry geom;
  rec.recording_id = static_cast<int>(csv::parse_int(mrow[static_cast<std::size_t>(c_id)],
                                                     paths.recording_meta));
  rec.frame_rate = csv::parse_double(mrow[static_cast<std::size_t>(c_rate)],
                                     paths.recording_meta);
  if (!(rec.frame_rate > 0)) {
    throw SchemaError("frameRate must be positive in " + paths.recording_meta);
  }
  const double limit = csv::parse_double(mrow[static_cast<std::size_t>(c_limit)],
                                         paths.recording_meta);
  if (limit > 0) rec.speed_limit = limit;
  geom.upper_marking_y = detail::parse_marking_list(
      mrow[static_cast<std::size_t>(c_upper)], paths.recording_meta);
  geom.lower_marking_y = detail::parse_marking_list(
      mrow[static_cast<std::size_t>(c_lower)], paths.recording_meta);
  if (c_merge >= 0 && !mrow[static_cast<std::size_t>(c_merge)].empty()) {
    for (auto part : csv::split(mrow[static_cast<std::size_t>(c_merge)], ';')) {
      geom.merge_lane_ids.push_back(
          static_cast<int>(csv::parse_int(part, paths.recording_meta)));
    }
  }
  rec.upper_lanes = geom.upper_lanes();
  rec.lower_lanes = geom.lower_lanes();

  // tracks meta
  const csv::Table tm = csv::read_file(paths.tracks_meta);
  const int t_id = tm.require_column("id", paths.tracks_meta);
  const int t_class = tm.require_column("class", paths.tracks_meta);
  const int t_dir = tm.require_column("drivingDirection", paths.tracks_meta);
  const int t_nf = tm.require_column("numFrames", paths.tracks_meta);

  std::map<int, std::size_t> track_pos;
  std::vector<std::int64_t> expected_frames;
  for (const auto& row : tm.rows) {
    VehicleTrack t;
    t.vehicle_id = static_cast<int>(csv::parse_int(row[static_cast<std::size_t>(t_id)],
                                                   paths.tracks_meta));
    const std::string& cls = row[static_cast<std::size_t>(t_class)];
    if (cls == "Car" || cls == "car") {
      t.vehicle_class = VehicleClass::Car;
    } else if (cls == "Truck" || cls == "truck") {
      t.vehicle_class = VehicleClass::Truck;
    } else {
      throw SchemaError("unknown vehicle class '" + cls + "' in " + paths.tracks_meta);
    }
    const std::int64_t dir = csv::parse_int(row[static_cast<std::size_t>(t_dir)],
                                            paths.tracks_meta);
    if (dir == 1) {
      t.driving_direction = DrivingDirection::Decreasing;
    } else if (dir == 2) {
      t.driving_direction = DrivingDirection::Increasing;
    } else {
      throw SchemaError("unknown drivingDirection '" + std::to_string(dir) + "' in " +
                        paths.tracks_meta);
    }
    if (track_pos.count(t.vehicle_id)) {
      throw IntegrityError("duplicate vehicle id " + std::to_string(t.vehicle_id) +
                           " in " + paths.tracks_meta);
    }
    track_pos[t.vehicle_id] = rec.tracks.size();
    expected_frames.push_back(csv::parse_int(row[static_cast<std::size_t>(t_nf)],
                                             paths.tracks_meta));
    rec.tracks.push_back(std::move(t));
  }

  // tracks
  const csv::Table tr = csv::read_file(paths.tracks);
  const auto col = [&](const char* name) {
    return static_cast<std::size_t>(tr.require_column(name, paths.tracks));
  };
  const std::size_t c_frame = col("frame"), c_vid = col("id"), c_x = col("x"),
                    c_y = col("y"), c_w = col("width"), c_h = col("height"),
                    c_vx = col("xVelocity"), c_vy = col("yVelocity"),
                    c_axc = col("xAcceleration"), c_ay = col("yAcceleration"),
                    c_dhw = col("dhw"), c_thw = col("thw"),
                    c_pid = col("precedingId"), c_fid = col("followingId"),
                    c_lpid = col("leftPrecedingId"), c_laid = col("leftAlongsideId"),
                    c_lfid = col("leftFollowingId"), c_rpid = col("rightPrecedingId"),
                    c_raid = col("rightAlongsideId"), c_rfid = col("rightFollowingId"),
                    c_lane = col("laneId");
  col("ttc");  // present in the schema but derived, not carried

  for (const auto& row : tr.rows) {
    const int vid = static_cast<int>(csv::parse_int(row[c_vid], paths.tracks));
    const auto it = track_pos.find(vid);
    if (it == track_pos.end()) {
      throw IntegrityError("tracks row references vehicle " + std::to_string(vid) +
                           " absent from " + paths.tracks_meta);
    }
    VehicleTrack& t = rec.tracks[it->second];

    TrackFrame f;
    f.frame_index = csv::parse_int(row[c_frame], paths.tracks);
    f.vehicle_id = vid;
    f.x = csv::parse_double(row[c_x], paths.tracks);
    f.y = csv::parse_double(row[c_y], paths.tracks);
    f.vx = csv::parse_double(row[c_vx], paths.tracks);
    f.vy = csv::parse_double(row[c_vy], paths.tracks);
    f.ax = csv::parse_double(row[c_axc], paths.tracks);
    f.ay = csv::parse_double(row[c_ay], paths.tracks);
    f.lane_id = static_cast<int>(csv::parse_int(row[c_lane], paths.tracks));
    f.space_headway = csv::parse_double(row[c_dhw], paths.tracks);
    f.time_headway = csv::parse_double(row[c_thw], paths.tracks);
    f.preceding_id = static_cast<int>(csv::parse_int(row[c_pid], paths.tracks));
    f.following_id = static_cast<int>(csv::parse_int(row[c_fid], paths.tracks));
    f.left_preceding_id = static_cast<int>(csv::parse_int(row[c_lpid], paths.tracks));
    f.left_alongside_id = static_cast<int>(csv::parse_int(row[c_laid], paths.tracks));
    f.left_following_id = static_cast<int>(csv::parse_int(row[c_lfid], paths.tracks));
    f.right_preceding_id = static_cast<int>(csv::parse_int(row[c_rpid], paths.tracks));
    f.right_alongside_id = static_cast<int>(csv::parse_int(row[c_raid], paths.tracks));
    f.right_following_id = static_cast<int>(csv::parse_int(row[c_rfid], paths.tracks));

    if (f.space_headway < 0 || f.time_headway < 0) {
      throw IntegrityError("negative headway for vehicle " + std::to_string(vid) +
                           " at frame " + std::to_string(f.frame_index));
    }
    if (f.preceding_id == 0 && (f.space_headway != 0 || f.time_headway != 0)) {
      throw IntegrityError("vehicle " + std::to_string(vid) + " at frame " +
                           std::to_string(f.frame_index) +
                           " has headway but no preceding vehicle");
    }
    if (t.frames.empty()) {
      t.length = csv::parse_double(row[c_w], paths.tracks);
      t.width = csv::parse_double(row[c_h], paths.tracks);
    } else if (f.frame_index != t.frames.back().frame_index + 1) {
      throw IntegrityError("vehicle " + std::to_string(vid) +
                           " frames not contiguous at frame " +
                           std::to_string(f.frame_index));
    }
    detail::flip_to_direction_frame(f, t.driving_direction);

    const LaneSet& lanes = rec.lanes_for(t.driving_direction);
    if (!lanes.contains(f.lane_id)) {
      throw IntegrityError("vehicle " + std::to_string(vid) + " references lane " +
                           std::to_string(f.lane_id) +
                           " missing for its driving direction");
    }
    if (f.left_preceding_id || f.left_alongside_id || f.left_following_id ||
        f.right_preceding_id || f.right_alongside_id || f.right_following_id) {
      rec.neighbor_ids_populated = true;
    }
    t.frames.push_back(f);
  }

  for (std::size_t i = 0; i < rec.tracks.size(); ++i) {
    if (static_cast<std::int64_t>(rec.tracks[i].frames.size()) != expected_frames[i]) {
      throw IntegrityError("vehicle " + std::to_string(rec.tracks[i].vehicle_id) +
                           " has " + std::to_string(rec.tracks[i].frames.size()) +
                           " frames, tracks meta says " +
                           std::to_string(expected_frames[i]));
    }
  }

  rec.finalize();
  return RecordingData{std::move(rec), std::move(geom)};
}

namespace detail {

inline double file_ttc(const Recording& rec, const VehicleTrack& t, const TrackFrame& f) {
  if (f.preceding_id == 0) return 0.0;
  const VehicleTrack* lead = rec.find_track(f.preceding_id);
  if (!lead || !lead->has_frame(f.frame_index)) return 0.0;
  const TrackFrame& lf = lead->at_frame(f.frame_index);
  const double closing = f.vx - lf.vx;
  if (closing == 0.0) return 0.0;
  (void)t;
  return (lf.x - f.x) / closing;
}

}  // namespace detail

inline void write_recording(const RecordingData& data, const RecordingPaths& paths) {
  const Recording& rec = data.recording;
  const LaneGeometry& geom = data.geometry;

  csv::Writer meta(paths.recording_meta);
  meta.row({"id", "frameRate", "speedLimit", "upperLaneMarkings", "lowerLaneMarkings",
            "mergeLanes"});
  meta.row({std::to_string(rec.recording_id), csv::format_double(rec.frame_rate),
            csv::format_double(rec.speed_limit.value_or(-1.0)),
            detail::join_doubles(geom.upper_marking_y),
            detail::join_doubles(geom.lower_marking_y),
            detail::join_ints(geom.merge_lane_ids)});
  meta.close();

  std::vector<const VehicleTrack*> order;
  order.reserve(rec.tracks.size());
  for (const auto& t : rec.tracks) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const VehicleTrack* a, const VehicleTrack* b) {
              return a->vehicle_id < b->vehicle_id;
            });

  csv::Writer tm(paths.tracks_meta);
  tm.row({"id", "class", "drivingDirection", "numFrames"});
  for (const VehicleTrack* t : order) {
    tm.row({std::to_string(t->vehicle_id),
            t->vehicle_class == VehicleClass::Car ? "Car" : "Truck",
            t->driving_direction == DrivingDirection::Decreasing ? "1" : "2",
            std::to_string(t->frames.size())});
  }
  tm.close();

  csv::Writer tr(paths.tracks);
  tr.row({"frame", "id", "x", "y", "width", "height", "xVelocity", "yVelocity",
          "xAcceleration", "yAcceleration", "dhw", "thw", "ttc", "precedingId",
          "followingId", "leftPrecedingId", "leftAlongsideId", "leftFollowingId",
          "rightPrecedingId", "rightAlongsideId", "rightFollowingId", "laneId"});
  for (const VehicleTrack* t : order) {
    for (const TrackFrame& canonical : t->frames) {
      TrackFrame f = canonical;
      const double ttc = detail::file_ttc(rec, *t, canonical);
      detail::flip_to_direction_frame(f, t->driving_direction);
      tr.row({std::to_string(f.frame_index), std::to_string(f.vehicle_id),
              csv::format_double(f.x), csv::format_double(f.y),
              csv::format_double(t->length), csv::format_double(t->width),
              csv::format_double(f.vx), csv::format_double(f.vy),
              csv::format_double(f.ax), csv::format_double(f.ay),
              csv::format_double(f.space_headway), csv::format_double(f.time_headway),
              csv::format_double(ttc), std::to_string(f.preceding_id),
              std::to_string(f.following_id), std::to_string(f.left_preceding_id),
              std::to_string(f.left_alongside_id), std::to_string(f.left_following_id),
              std::to_string(f.right_preceding_id), std::to_string(f.right_alongside_id),
              std::to_string(f.right_following_id), std::to_string(f.lane_id)});
    }
  }
  tr.close();
}

inline DatasetManifest discover_manifest(const std::string& root) {
  namespace fs = std::filesystem;
  DatasetManifest m;
  m.root = root;
  if (!fs::is_directory(root)) throw IoError("dataset root is not a directory: " + root);
  std::vector<std::string> meta_files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const std::string suffix = "_recordingMeta.csv";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      meta_files.push_back(entry.path().string());
    }
  }
  std::sort(meta_files.begin(), meta_files.end());
  for (const std::string& meta : meta_files) {
    const std::string prefix = meta.substr(0, meta.size() - std::string("recordingMeta.csv").size());
    RecordingPaths p;
    p.recording_meta = meta;
    p.tracks_meta = prefix + "tracksMeta.csv";
    p.tracks = prefix + "tracks.csv";
    if (!fs::exists(p.tracks_meta)) throw IoError("missing " + p.tracks_meta);
    if (!fs::exists(p.tracks)) throw IoError("missing " + p.tracks);
    m.entries.push_back(std::move(p));
  }
  return m;
}

inline bool recordings_equal(const Recording& a, const Recording& b) {
  return a.recording_id == b.recording_id && a.frame_rate == b.frame_rate &&
         a.speed_limit == b.speed_limit && a.upper_lanes == b.upper_lanes &&
         a.lower_lanes == b.lower_lanes && a.tracks == b.tracks;
}

}  // namespace dsadlc
