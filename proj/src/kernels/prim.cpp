#include "sensakit/kernels/prim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <omp.h>

#include "sensakit/error.hpp"
#include "sensakit/kernels/simd.hpp"

namespace sensakit::kernels {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_points(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::length_mismatch, "MST: coordinate lengths differ");
  if (x.size() < 2) throw Error(ErrorCode::invalid_argument, "MST needs at least two points");
}

struct Candidate {
  double dist = kInf;
  std::int64_t id = std::numeric_limits<std::int64_t>::max();
  std::int64_t pos = -1;
};

inline bool better(double d, std::int64_t id, const Candidate& c) {
  return d < c.dist || (d == c.dist && id < c.id);
}

}  // namespace

namespace serial {

MstResult prim(std::span<const double> x, std::span<const double> y) {
  check_points(x, y);
  const std::size_t n = x.size();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> parent(n, 0);
  std::vector<char> in_tree(n, 0);
  MstResult out;
  out.edges.reserve(n - 1);
  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    for (std::size_t w = 0; w < n; ++w) {
      if (in_tree[w]) continue;
      const double dx = x[w] - x[current];
      const double dy = y[w] - y[current];
      const double d2 = dx * dx + dy * dy;
      if (d2 < dist[w]) {
        dist[w] = d2;
        parent[w] = current;
      }
    }
    std::size_t next = n;
    for (std::size_t w = 0; w < n; ++w) {
      if (!in_tree[w] && (next == n || dist[w] < dist[next])) next = w;
    }
    in_tree[next] = 1;
    out.edges.emplace_back(parent[next], next);
    out.total_length += std::sqrt(dist[next]);
    current = next;
  }
  return out;
}

}  // namespace serial

namespace parallel {

MstResult prim(std::span<const double> x, std::span<const double> y) {
  using namespace simd;
  check_points(x, y);
  const std::size_t n = x.size();
  const std::size_t m = n - 1;  // vertices outside the tree at the start

  // Structure-of-arrays over vertices 1..n-1, compacted per slice.
  std::vector<double> px(x.begin() + 1, x.end());
  std::vector<double> py(y.begin() + 1, y.end());
  std::vector<double> pd(m, kInf);
  std::vector<std::int64_t> pid(m);
  std::vector<std::int64_t> ppar(m, 0);
  for (std::size_t i = 0; i < m; ++i) pid[i] = static_cast<std::int64_t>(i + 1);

  constexpr std::size_t kMinSlice = 4096;
  const int requested = static_cast<int>(
      std::clamp<std::size_t>(m / kMinSlice, 1, static_cast<std::size_t>(std::max(1, omp_get_max_threads()))));
  int threads = 1;
  std::vector<std::size_t> begin;
  std::vector<std::size_t> live;
  std::vector<Candidate> slot;

  MstResult out;
  out.edges.reserve(m);
  double cx = x[0];
  double cy = y[0];
  std::int64_t cid = 0;

#pragma omp parallel num_threads(requested)
  {
    // The team may be smaller than requested (nested regions), so slices
    // are laid out once the actual size is known.
#pragma omp single
    {
      threads = omp_get_num_threads();
      begin.resize(threads + 1);
      for (int t = 0; t <= threads; ++t) {
        begin[t] = m * static_cast<std::size_t>(t) / static_cast<std::size_t>(threads);
      }
      live.resize(threads);
      for (int t = 0; t < threads; ++t) live[t] = begin[t + 1] - begin[t];
      slot.resize(threads);
    }
    const int t = omp_get_thread_num();
    for (std::size_t step = 0; step < m; ++step) {
      const std::size_t lo = begin[t];
      const std::size_t hi = lo + live[t];
      const vd vcx = broadcast(cx);
      const vd vcy = broadcast(cy);
      const vl vcid = broadcast(cid);
      vd best_d = broadcast(kInf);
      vl best_id = broadcast(std::numeric_limits<std::int64_t>::max());
      vl best_pos = broadcast(std::int64_t{-1});
      vl pos = iota() + static_cast<std::int64_t>(lo);
      std::size_t p = lo;
      for (; p + kLanes <= hi; p += kLanes) {
        const vd dx = load(&px[p]) - vcx;
        const vd dy = load(&py[p]) - vcy;
        const vd d2 = dx * dx + dy * dy;
        vd d = load(&pd[p]);
        const vl closer = d2 < d;
        d = closer ? d2 : d;
        store(&pd[p], d);
        store(&ppar[p], closer ? vcid : load(&ppar[p]));
        const vl id = load(&pid[p]);
        const vl take = (d < best_d) | ((d == best_d) & (id < best_id));
        best_d = take ? d : best_d;
        best_id = take ? id : best_id;
        best_pos = take ? pos : best_pos;
        pos += static_cast<std::int64_t>(kLanes);
      }
      Candidate local;
      for (std::size_t lane = 0; lane < kLanes; ++lane) {
        if (better(best_d[lane], best_id[lane], local)) local = {best_d[lane], best_id[lane], best_pos[lane]};
      }
      for (; p < hi; ++p) {
        const double dx = px[p] - cx;
        const double dy = py[p] - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 < pd[p]) {
          pd[p] = d2;
          ppar[p] = cid;
        }
        if (better(pd[p], pid[p], local)) local = {pd[p], pid[p], static_cast<std::int64_t>(p)};
      }
      slot[t] = local;
#pragma omp barrier
#pragma omp single
      {
        int owner = 0;
        Candidate winner;
        for (int s = 0; s < threads; ++s) {
          if (slot[s].pos >= 0 && better(slot[s].dist, slot[s].id, winner)) {
            winner = slot[s];
            owner = s;
          }
        }
        const auto wp = static_cast<std::size_t>(winner.pos);
        out.edges.emplace_back(static_cast<std::size_t>(ppar[wp]), static_cast<std::size_t>(winner.id));
        out.total_length += std::sqrt(winner.dist);
        cx = px[wp];
        cy = py[wp];
        cid = winner.id;
        const std::size_t last = begin[owner] + live[owner] - 1;
        px[wp] = px[last];
        py[wp] = py[last];
        pd[wp] = pd[last];
        pid[wp] = pid[last];
        ppar[wp] = ppar[last];
        --live[owner];
      }
    }
  }
  return out;
}

}  // namespace parallel
}  // namespace sensakit::kernels
