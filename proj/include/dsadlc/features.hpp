#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dsadlc/errors.hpp"
#include "dsadlc/trajectory.hpp"

namespace dsadlc {

// 8 vehicle features x 7 statistics summarizing a 2-second window.
// Rows: relative local y, relative local x, lateral velocity, longitudinal
// velocity, lateral acceleration, longitudinal acceleration, space headway,
// time headway.
// Columns: mean, standard deviation, median, 25% percentile, 75% percentile,
// minimum, maximum.
struct Dop {
  static constexpr int kRows = 8;
  static constexpr int kCols = 7;
  static constexpr int kSize = kRows * kCols;

  std::array<double, kSize> e{};  // zero-initialized; absent vehicle stays 0

  double& at(int row, int col) { return e[static_cast<std::size_t>(row * kCols + col)]; }
  double at(int row, int col) const { return e[static_cast<std::size_t>(row * kCols + col)]; }

  bool is_zero() const {
    return std::all_of(e.begin(), e.end(), [](double v) { return v == 0.0; });
  }

  bool operator==(const Dop&) const = default;
};

// Speed-gain, safety, and tolerance variables, in fixed order:
// (vE-vP), (vPL-vP), (vPR-vP), (dPL-dP), (dPR-dP), dFL, dFR, (vE-vFL),
// (vE-vFR), (dP - vE*th).
struct TrafficFactors {
  static constexpr int kSize = 10;
  std::array<double, kSize> v{};

  bool operator==(const TrafficFactors&) const = default;
};

constexpr double kDefaultSafeTimeHeadway = 1.5;  // seconds
constexpr double kDopWindowSeconds = 2.0;

namespace detail {

// Population standard deviation via Welford; the test oracle uses the
// two-pass formula instead.
inline void mean_std(std::span<const double> xs, double& mean, double& std_out) {
  double m = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    const double d = x - m;
    m += d / static_cast<double>(n);
    m2 += d * (x - m);
  }
  mean = m;
  std_out = n > 0 ? std::sqrt(m2 / static_cast<double>(n)) : 0.0;
}

// Linear interpolation between closest ranks on a mutable scratch buffer.
inline double percentile(std::vector<double>& scratch, double q) {
  const std::size_t n = scratch.size();
  const double rank = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const double frac = rank - static_cast<double>(lo);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(lo),
                   scratch.end());
  const double vlo = scratch[lo];
  if (frac == 0.0 || lo + 1 >= n) return vlo;
  // nth_element leaves [lo+1, end) all >= vlo; the next rank is its minimum.
  const double vhi = *std::min_element(scratch.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                                       scratch.end());
  return vlo + frac * (vhi - vlo);
}

inline void fill_stat_row(Dop& dop, int row, std::span<const double> xs,
                          std::vector<double>& scratch) {
  double mean = 0.0, sd = 0.0;
  mean_std(xs, mean, sd);
  scratch.assign(xs.begin(), xs.end());
  const double med = percentile(scratch, 0.50);
  scratch.assign(xs.begin(), xs.end());
  const double p25 = percentile(scratch, 0.25);
  scratch.assign(xs.begin(), xs.end());
  const double p75 = percentile(scratch, 0.75);
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  dop.at(row, 0) = mean;
  dop.at(row, 1) = sd;
  dop.at(row, 2) = med;
  dop.at(row, 3) = p25;
  dop.at(row, 4) = p75;
  dop.at(row, 5) = *mn;
  dop.at(row, 6) = *mx;
}

}  // namespace detail

// Statistics over one vehicle's window. Positions are relative to the first
// frame of the window; headway rows keep the frame encoding (0 when there is
// no preceding vehicle).
inline Dop compute_dop(const TrajectoryWindow& w) {
  const std::int64_t need = window_frame_count(kDopWindowSeconds, w.frame_rate);
  if (static_cast<std::int64_t>(w.frames.size()) != need) {
    throw WindowUnderrun("DOP needs a " + std::to_string(need) +
                         "-frame window, got " + std::to_string(w.frames.size()));
  }
  const std::size_t n = w.frames.size();
  std::vector<double> col(n);
  std::vector<double> scratch;
  Dop dop;

  const double y0 = w.frames.front().y;
  const double x0 = w.frames.front().x;
  const auto fill = [&](int row, auto getter) {
    for (std::size_t i = 0; i < n; ++i) col[i] = getter(w.frames[i]);
    detail::fill_stat_row(dop, row, col, scratch);
  };
  fill(0, [&](const TrackFrame& f) { return f.y - y0; });
  fill(1, [&](const TrackFrame& f) { return f.x - x0; });
  fill(2, [](const TrackFrame& f) { return f.vy; });
  fill(3, [](const TrackFrame& f) { return f.vx; });
  fill(4, [](const TrackFrame& f) { return f.ay; });
  fill(5, [](const TrackFrame& f) { return f.ax; });
  fill(6, [](const TrackFrame& f) { return f.space_headway; });
  fill(7, [](const TrackFrame& f) { return f.time_headway; });
  return dop;
}

// Velocity and unsigned front-center distance of a neighbor, both 0 when the
// role is unoccupied.
namespace detail {

struct VehicleState {
  double v = 0.0;
  double d = 0.0;
};

inline VehicleState neighbor_state(const Recording& rec, const TrackFrame& ego_frame,
                                   std::optional<int> id) {
  if (!id) return {};
  const VehicleTrack& t = rec.track(*id);
  const TrackFrame& f = t.at_frame(ego_frame.frame_index);
  return {f.vx, std::abs(f.x - ego_frame.x)};
}

}  // namespace detail

inline TrafficFactors compute_factors(const Recording& rec, int ego_id,
                                      std::int64_t frame_index,
                                      double t_h = kDefaultSafeTimeHeadway) {
  const VehicleTrack& ego = rec.track(ego_id);
  const TrackFrame& ef = ego.at_frame(frame_index);
  const NeighborSet n = neighbors(rec, ego_id, frame_index);

  const auto p = detail::neighbor_state(rec, ef, n.p);
  const auto pl = detail::neighbor_state(rec, ef, n.pl);
  const auto pr = detail::neighbor_state(rec, ef, n.pr);
  const auto fl = detail::neighbor_state(rec, ef, n.fl);
  const auto fr = detail::neighbor_state(rec, ef, n.fr);
  const double v_e = ef.vx;

  TrafficFactors t;
  t.v[0] = v_e - p.v;
  t.v[1] = pl.v - p.v;
  t.v[2] = pr.v - p.v;
  t.v[3] = pl.d - p.d;
  t.v[4] = pr.d - p.d;
  t.v[5] = fl.d;
  t.v[6] = fr.d;
  t.v[7] = v_e - fl.v;
  t.v[8] = v_e - fr.v;
  t.v[9] = p.d - v_e * t_h;
  return t;
}

// One decision instance's model input: the surrounding DOPs stacked in fixed
// channel order (P, PL, PR, FL, FR, ASL, ASR), the ego DOP, and the traffic
// factors.
struct FeatureBundle {
  static constexpr int kSurroundChannels = 7;
  static constexpr int kFlatSize =
      (kSurroundChannels + 1) * Dop::kSize + TrafficFactors::kSize;  // 458

  std::array<Dop, kSurroundChannels> surround{};
  Dop ego{};
  TrafficFactors factors{};

  bool operator==(const FeatureBundle&) const = default;

  // Case-file row layout: surround channels (row-major each), ego, factors.
  void flatten(std::span<double> out) const {
    std::size_t k = 0;
    for (const Dop& d : surround) {
      std::copy(d.e.begin(), d.e.end(), out.begin() + static_cast<std::ptrdiff_t>(k));
      k += Dop::kSize;
    }
    std::copy(ego.e.begin(), ego.e.end(), out.begin() + static_cast<std::ptrdiff_t>(k));
    k += Dop::kSize;
    std::copy(factors.v.begin(), factors.v.end(),
              out.begin() + static_cast<std::ptrdiff_t>(k));
  }

  static FeatureBundle unflatten(std::span<const double> in) {
    FeatureBundle b;
    std::size_t k = 0;
    for (Dop& d : b.surround) {
      std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(k), Dop::kSize, d.e.begin());
      k += Dop::kSize;
    }
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(k), Dop::kSize, b.ego.e.begin());
    k += Dop::kSize;
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(k), TrafficFactors::kSize,
                b.factors.v.begin());
    return b;
  }
};

// Builds the model input at a decision frame. The ego needs the full window;
// surrounding vehicles without enough history count as absent (zero DOP).
inline FeatureBundle assemble_case(const Recording& rec, int ego_id,
                                   std::int64_t decision_frame,
                                   double t_h = kDefaultSafeTimeHeadway) {
  const VehicleTrack& ego = rec.track(ego_id);
  FeatureBundle b;
  b.ego = compute_dop(window(ego, rec.frame_rate, decision_frame, kDopWindowSeconds));
  b.factors = compute_factors(rec, ego_id, decision_frame, t_h);

  const NeighborSet n = neighbors(rec, ego_id, decision_frame);
  const std::array<std::optional<int>, FeatureBundle::kSurroundChannels> roles = {
      n.p, n.pl, n.pr, n.fl, n.fr, n.asl, n.asr};
  for (int c = 0; c < FeatureBundle::kSurroundChannels; ++c) {
    if (!roles[static_cast<std::size_t>(c)]) continue;
    const VehicleTrack& t = rec.track(*roles[static_cast<std::size_t>(c)]);
    try {
      b.surround[static_cast<std::size_t>(c)] = compute_dop(
          window(t, rec.frame_rate, decision_frame, kDopWindowSeconds));
    } catch (const WindowUnderrun&) {
      // insufficient history: treated as absent
    }
  }
  return b;
}

}  // namespace dsadlc
