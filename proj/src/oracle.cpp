#include "nomamec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nomamec/data_alloc.hpp"
#include "nomamec/energy.hpp"

namespace nomamec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective that treats untransmittable and overflowing points as +inf
// instead of throwing; grid cells land there routinely.
double safe_objective(const ProblemInstance& instance, const Allocation& alloc,
                      long long& evaluations) {
  ++evaluations;
  try {
    return total_objective(instance, alloc);
  } catch (const PowerOverflowError&) {
    return kInf;
  } catch (const std::invalid_argument&) {
    return kInf;
  }
}

void for_each_composition(int parts, int total, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> k(static_cast<std::size_t>(parts), 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == parts - 1) {
      k[static_cast<std::size_t>(pos)] = remaining;
      fn(k);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, total);
}

// Golden-section minimization of a unimodal (convex) section. Returns the
// best sampled abscissa.
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  if (hi <= lo) return lo;
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, bnd = hi;
  double x1 = bnd - kInvPhi * (bnd - a);
  double x2 = a + kInvPhi * (bnd - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 120 && bnd - a > 1e-15 * (std::abs(a) + std::abs(bnd) + 1e-30); ++i) {
    if (f1 <= f2) {
      bnd = x2;
      x2 = x1;
      f2 = f1;
      x1 = bnd - kInvPhi * (bnd - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (bnd - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

struct Polisher {
  const ProblemInstance& instance;
  Allocation point;
  double value;
  long long& evaluations;
  double last_sweep_gain = 0.0;

  double try_eval(const Allocation& candidate) {
    return safe_objective(instance, candidate, evaluations);
  }

  void line_search(const std::function<void(Allocation&, double)>& apply, double lo, double hi) {
    if (hi - lo <= 0.0) return;
    Allocation scratch = point;
    auto section = [&](double x) {
      scratch = point;
      apply(scratch, x);
      return try_eval(scratch);
    };
    const double best_x = golden_min(section, lo, hi);
    scratch = point;
    apply(scratch, best_x);
    const double candidate = try_eval(scratch);
    if (candidate < value) {
      point = scratch;
      value = candidate;
    }
  }

  // One cyclic pass over every feasible direction: slot transfers between
  // group pairs, single data coordinates, and load-preserving data
  // exchanges once capacity is tight.
  double sweep() {
    const double before = value;
    const std::size_t n = instance.group_count();

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double ti = point.time_s[i], tj = point.time_s[j];
        line_search(
            [i, j, ti, tj](Allocation& a, double x) {
              a.time_s[i] = ti + x;
              a.time_s[j] = tj - x;
            },
            -ti, tj);
      }
    }

    double load = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j)
        load += point.data_bits[i][static_cast<std::size_t>(j)] *
                instance.groups[i].user(j).cycles_per_bit;

    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        const UserProfile& u = instance.groups[i].user(j);
        const DataBox box = data_box(u, instance.deadline_s);
        const double d = point.data_bits[i][static_cast<std::size_t>(j)];
        const double headroom =
            (instance.cloud_capacity_cycles - (load - d * u.cycles_per_bit)) / u.cycles_per_bit;
        const double hi = std::min(box.hi, headroom);
        if (hi <= box.lo) continue;
        line_search(
            [i, j](Allocation& a, double x) {
              a.data_bits[i][static_cast<std::size_t>(j)] = x;
            },
            box.lo, hi);
        load += (point.data_bits[i][static_cast<std::size_t>(j)] - d) * u.cycles_per_bit;
      }
    }

    const bool binding =
        load >= instance.cloud_capacity_cycles * (1.0 - 1e-9) && instance.cloud_capacity_cycles > 0.0;
    if (binding) {
      // Exchange bits between user pairs at constant cloud load.
      struct Coord {
        std::size_t group;
        int user;
      };
      std::vector<Coord> coords;
      for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j) coords.push_back({i, j});
      for (std::size_t a = 0; a < coords.size(); ++a) {
        for (std::size_t bidx = a + 1; bidx < coords.size(); ++bidx) {
          const auto [gi, ui] = coords[a];
          const auto [gj, uj] = coords[bidx];
          const UserProfile& ua = instance.groups[gi].user(ui);
          const UserProfile& ub = instance.groups[gj].user(uj);
          const DataBox ba = data_box(ua, instance.deadline_s);
          const DataBox bb = data_box(ub, instance.deadline_s);
          const double da = point.data_bits[gi][static_cast<std::size_t>(ui)];
          const double db = point.data_bits[gj][static_cast<std::size_t>(uj)];
          const double ratio = ua.cycles_per_bit / ub.cycles_per_bit;
          // da + x, db - x*ratio; rounding may overshoot a bound by one
          // ulp, so the application clamps back into the boxes
          double lo = std::max(ba.lo - da, (db - bb.hi) / ratio);
          double hi = std::min(ba.hi - da, (db - bb.lo) / ratio);
          if (hi <= lo) continue;
          line_search(
              [gi, ui, gj, uj, da, db, ratio, ba, bb](Allocation& al, double x) {
                al.data_bits[gi][static_cast<std::size_t>(ui)] =
                    std::clamp(da + x, ba.lo, ba.hi);
                al.data_bits[gj][static_cast<std::size_t>(uj)] =
                    std::clamp(db - x * ratio, bb.lo, bb.hi);
              },
              lo, hi);
        }
      }
    }

    last_sweep_gain = before - value;
    return last_sweep_gain;
  }

  void run() {
    for (int pass = 0; pass < 400; ++pass) {
      const double gain = sweep();
      if (gain <= 1e-13 * std::max(std::abs(value), 1e-300)) break;
    }
  }
};

}  // namespace

OracleResult grid_oracle(const ProblemInstance& instance, int steps_per_dim) {
  const std::size_t n = instance.group_count();
  if (n > 3) throw std::invalid_argument("grid_oracle: refused for more than 3 groups");
  if (steps_per_dim < 8) throw std::invalid_argument("grid_oracle: need at least 8 steps per dim");
  const ValidationReport validation = validate_instance(instance);
  if (!validation.ok())
    throw InfeasibleError("instance rejected:\n" + validation.to_string());

  OracleResult result;
  result.steps_per_dim = steps_per_dim;
  const int steps = steps_per_dim;
  const double deadline = instance.deadline_s;
  const double dt = deadline / steps;

  // When even full offload fits the cloud, the data choice decouples per
  // group and the per-group d-grid minimum only depends on the group's own
  // slot level. Otherwise fall back to the full product enumeration.
  double full_offload_cycles = 0.0;
  for (const NomaGroup& g : instance.groups)
    full_offload_cycles +=
        g.user1.data_bits * g.user1.cycles_per_bit + g.user2.data_bits * g.user2.cycles_per_bit;
  const bool decoupled = full_offload_cycles <= instance.cloud_capacity_cycles;

  std::vector<std::vector<DataBox>> boxes(n);
  for (std::size_t i = 0; i < n; ++i)
    boxes[i] = {data_box(instance.groups[i].user1, deadline),
                data_box(instance.groups[i].user2, deadline)};

  auto grid_value = [&](const DataBox& box, int idx) {
    if (box.hi <= box.lo) return box.lo;
    if (idx >= steps) return box.hi;  // endpoint exactly, no rounding drift
    return box.lo + (box.hi - box.lo) * idx / steps;
  };

  Allocation best;
  best.time_s.assign(n, 0.0);
  best.data_bits.assign(n, {0.0, 0.0});
  double best_value = kInf;
  std::vector<int> best_k(n, 0);

  if (decoupled) {
    // table[i][k] = best per-group energy with slot k*dt, plus the minimizer
    struct Cell {
      double value = kInf;
      std::array<double, 2> d{0.0, 0.0};
    };
    std::vector<std::vector<Cell>> table(n, std::vector<Cell>(static_cast<std::size_t>(steps) + 1));
    Allocation probe;
    probe.time_s.assign(1, 0.0);
    probe.data_bits.assign(1, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
      ProblemInstance single = instance;
      single.groups = {instance.groups[i]};
      for (int k = 0; k <= steps; ++k) {
        probe.time_s[0] = k * dt;
        Cell cell;
        for (int x = 0; x <= steps; ++x) {
          for (int y = 0; y <= steps; ++y) {
            probe.data_bits[0] = {grid_value(boxes[i][0], x), grid_value(boxes[i][1], y)};
            const double v = safe_objective(single, probe, result.evaluations);
            if (v < cell.value) {
              cell.value = v;
              cell.d = probe.data_bits[0];
            }
            if (boxes[i][1].hi <= boxes[i][1].lo) break;
          }
          if (boxes[i][0].hi <= boxes[i][0].lo) break;
        }
        table[i][static_cast<std::size_t>(k)] = cell;
      }
    }
    for_each_composition(static_cast<int>(n), steps, [&](const std::vector<int>& k) {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        v += table[i][static_cast<std::size_t>(k[i])].value;
        if (v >= best_value) return;
      }
      best_value = v;
      best_k = k;
    });
    if (!std::isfinite(best_value))
      throw std::runtime_error("grid_oracle: no feasible grid point");
    for (std::size_t i = 0; i < n; ++i) {
      best.time_s[i] = best_k[i] * dt;
      best.data_bits[i] = table[i][static_cast<std::size_t>(best_k[i])].d;
    }
  } else {
    // Full product grid with capacity filter. Guard the cost first.
    double estimate = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j)
        estimate *= boxes[i][static_cast<std::size_t>(j)].hi >
                            boxes[i][static_cast<std::size_t>(j)].lo
                        ? steps + 1
                        : 1;
    double comps = 1.0;
    for (int i = 1; i < static_cast<int>(n); ++i)
      comps = comps * (steps + i) / i;
    if (estimate * comps > 5e7)
      throw std::invalid_argument(
          "grid_oracle: grid too large for coupled capacity; reduce steps or groups");

    Allocation probe;
    probe.time_s.assign(n, 0.0);
    probe.data_bits.assign(n, {0.0, 0.0});
    for_each_composition(static_cast<int>(n), steps, [&](const std::vector<int>& k) {
      for (std::size_t i = 0; i < n; ++i) probe.time_s[i] = k[i] * dt;
      std::function<void(std::size_t, double)> rec = [&](std::size_t coord, double load) {
        if (load > instance.cloud_capacity_cycles) return;
        if (coord == 2 * n) {
          const double v = safe_objective(instance, probe, result.evaluations);
          if (v < best_value) {
            best_value = v;
            best = probe;
            best_k = k;
          }
          return;
        }
        const std::size_t i = coord / 2;
        const int j = static_cast<int>(coord % 2);
        const DataBox& box = boxes[i][static_cast<std::size_t>(j)];
        const double c = instance.groups[i].user(j).cycles_per_bit;
        const int top = box.hi > box.lo ? steps : 0;
        for (int idx = 0; idx <= top; ++idx) {
          const double d = grid_value(box, idx);
          const double next = load + d * c;
          if (next > instance.cloud_capacity_cycles && idx > 0) break;  // grids ascend
          probe.data_bits[i][static_cast<std::size_t>(j)] = d;
          rec(coord + 1, next);
        }
        probe.data_bits[i][static_cast<std::size_t>(j)] = grid_value(box, 0);
      };
      rec(0, 0.0);
    });
    if (!std::isfinite(best_value))
      throw std::runtime_error("grid_oracle: no feasible grid point");
  }

  // Curvature-based dip of the winning cell: how far below the sampled
  // corner the true surface could sit within one step.
  double grid_dip = 0.0;
  {
    Allocation probe = best;
    auto value_at = [&]() { return safe_objective(instance, probe, result.evaluations); };
    const double f0 = best_value;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      // transfer one slot step between adjacent groups, both directions
      if (best.time_s[i] < dt || best.time_s[i + 1] < dt) continue;
      probe = best;
      probe.time_s[i] -= dt;
      probe.time_s[i + 1] += dt;
      const double fm = value_at();
      probe = best;
      probe.time_s[i] += dt;
      probe.time_s[i + 1] -= dt;
      const double fp = value_at();
      if (std::isfinite(fm) && std::isfinite(fp))
        grid_dip += std::max(0.0, (fm + fp - 2.0 * f0) / 8.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        const DataBox& box = boxes[i][static_cast<std::size_t>(j)];
        if (box.hi <= box.lo) continue;
        const double h = (box.hi - box.lo) / steps;
        const double d0 = best.data_bits[i][static_cast<std::size_t>(j)];
        if (d0 - h < box.lo || d0 + h > box.hi) continue;
        probe = best;
        probe.data_bits[i][static_cast<std::size_t>(j)] = d0 - h;
        const double fm = value_at();
        probe = best;
        probe.data_bits[i][static_cast<std::size_t>(j)] = d0 + h;
        const double fp = value_at();
        if (std::isfinite(fm) && std::isfinite(fp))
          grid_dip += std::max(0.0, (fm + fp - 2.0 * f0) / 8.0);
      }
    }
  }

  Polisher polisher{instance, best, best_value, result.evaluations};
  polisher.run();

  result.best_point = polisher.point;
  result.best_objective_j = polisher.value;
  result.resolution_bound_j =
      grid_dip + std::max(1e-8 * std::abs(polisher.value), 4.0 * polisher.last_sweep_gain);
  return result;
}

}  // namespace nomamec
