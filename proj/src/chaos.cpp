#include "orbitlab/chaos.hpp"

#include "orbitlab/errors.hpp"
#include "orbitlab/kernels.hpp"
#include "orbitlab/precise_alt_play.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orbitlab {

std::string_view to_string(ChaosVerdict verdict) {
  switch (verdict) {
    case ChaosVerdict::scramble_candidate: return "scramble-candidate";
    case ChaosVerdict::separated: return "separated";
    case ChaosVerdict::converging_pair: return "converging-pair";
    case ChaosVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string_view to_string(ConfinementStatus status) {
  switch (status) {
    case ConfinementStatus::confirmed: return "confirmed";
    case ConfinementStatus::refuted: return "refuted";
    case ConfinementStatus::skipped: return "skipped";
  }
  return "unknown";
}

std::string_view to_string(OrbitVerdict verdict) {
  switch (verdict) {
    case OrbitVerdict::yes: return "YES";
    case OrbitVerdict::no: return "NO";
    case OrbitVerdict::inconclusive: return "INCONCLUSIVE";
  }
  return "unknown";
}

ChaosVerdict classify_distances(double liminf, double limsup, const ChaosThresholds& t) {
  if (liminf <= t.eps_low && limsup >= t.eps_high) return ChaosVerdict::scramble_candidate;
  if (limsup <= t.eps_low) return ChaosVerdict::converging_pair;
  if (liminf > t.eps_low) return ChaosVerdict::separated;
  return ChaosVerdict::inconclusive;
}

ChaosReport scrambled_pair_estimate(const MapInstance& map, const State& x, const State& y,
                                    std::size_t horizon, const ChaosThresholds& thresholds,
                                    const Invariant* phi) {
  if (!same_layout(x, y)) throw DomainError("pair states must share a chart and layout");
  if (distance(x, y) == 0.0) throw std::invalid_argument("scrambled-pair estimate needs x != y");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  map.check_domain(x);
  map.check_domain(y);

  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(thresholds.tail_fraction * static_cast<double>(horizon))));
  const std::size_t window_start = horizon - window + 1;

  ChaosReport rep;
  rep.pair = {x, y};
  rep.horizon = horizon;
  rep.liminf_estimate = std::numeric_limits<double>::infinity();
  rep.limsup_estimate = -std::numeric_limits<double>::infinity();
  rep.invariant_gap = std::numeric_limits<double>::quiet_NaN();
  rep.phi_defect = std::numeric_limits<double>::quiet_NaN();

  auto record = [&](double d) {
    rep.liminf_estimate = std::min(rep.liminf_estimate, d);
    rep.limsup_estimate = std::max(rep.limsup_estimate, d);
  };

  const bool precise_phi = phi && phi->is_closed_form_for(map);
  if (map.kind() == MapKind::alt_play) {
    const double e1 = map.step_sizes()[0], e2 = map.step_sizes()[1];
    PreciseAltPlay tx(*map.payoff(), e1, e2, x), ty(*map.payoff(), e1, e2, y);
    double phi_x = 0.0, phi_y = 0.0;
    if (phi) {
      phi_x = precise_phi ? tx.phi_initial() : (*phi)(x);
      phi_y = precise_phi ? ty.phi_initial() : (*phi)(y);
      rep.invariant_gap = std::abs(phi_x - phi_y);
      rep.phi_defect = 0.0;
    }
    for (std::size_t k = 1; k <= horizon; ++k) {
      tx.step();
      ty.step();
      if (k >= window_start) record(tx.distance_to(ty));
      if (phi) {
        const double dx = precise_phi ? tx.relative_defect()
                                      : std::abs((*phi)(tx.state()) - phi_x) / (1.0 + std::abs(phi_x));
        const double dy = precise_phi ? ty.relative_defect()
                                      : std::abs((*phi)(ty.state()) - phi_y) / (1.0 + std::abs(phi_y));
        rep.phi_defect = std::max({rep.phi_defect, dx, dy});
      }
    }
  } else {
    State sx = x, sy = y;
    double phi_x = 0.0, phi_y = 0.0;
    if (phi) {
      phi_x = (*phi)(x);
      phi_y = (*phi)(y);
      rep.invariant_gap = std::abs(phi_x - phi_y);
      rep.phi_defect = 0.0;
    }
    for (std::size_t k = 1; k <= horizon; ++k) {
      sx = step(map, sx);
      sy = step(map, sy);
      if (!sx.coords().allFinite() || !sy.coords().allFinite())
        throw NumericalError("non-finite state in pair scan", static_cast<long>(k));
      if (k >= window_start) record(distance(sx, sy));
      if (phi) {
        rep.phi_defect = std::max({rep.phi_defect,
                                   std::abs((*phi)(sx) - phi_x) / (1.0 + std::abs(phi_x)),
                                   std::abs((*phi)(sy) - phi_y) / (1.0 + std::abs(phi_y))});
      }
    }
  }
  rep.verdict = classify_distances(rep.liminf_estimate, rep.limsup_estimate, thresholds);
  return rep;
}

ConfinementReport level_set_confinement(const MapInstance& map, const Invariant& phi,
                                        const std::vector<std::pair<State, State>>& pairs,
                                        std::size_t horizon, const ConfinementOptions& opts) {
  ConfinementReport out;
  if (phi.bipartite_form() && !phi.is_closed_form_for(map)) {
    out.status = ConfinementStatus::skipped;
    out.note = "closed-form invariant does not belong to this map; confinement not applicable";
    return out;
  }
  const auto backend = opts.parallel ? kernels::Backend::openmp : kernels::Backend::serial;
  out.reports = kernels::scan_pairs(map, pairs, horizon, opts.thresholds, &phi, backend);

  for (const ChaosReport& r : out.reports) out.max_phi_defect = std::max(out.max_phi_defect, r.phi_defect);
  if (!(out.max_phi_defect <= opts.defect_tolerance))
    throw std::logic_error("invariant defect " + std::to_string(out.max_phi_defect) +
                           " exceeds tolerance; phi is not a constant of motion here");

  for (const ChaosReport& r : out.reports) {
    switch (r.verdict) {
      case ChaosVerdict::scramble_candidate: {
        ++out.candidates;
        const double scale = 1.0 + std::max(std::abs(phi(r.pair.first)), std::abs(phi(r.pair.second)));
        if (r.invariant_gap > opts.gap_tolerance * scale) ++out.refutations;
        break;
      }
      case ChaosVerdict::separated: ++out.separated; break;
      case ChaosVerdict::converging_pair: ++out.converging; break;
      case ChaosVerdict::inconclusive: ++out.inconclusive; break;
    }
  }
  out.status = out.refutations > 0 ? ConfinementStatus::refuted : ConfinementStatus::confirmed;
  if (!map.validated() || map.kind() != MapKind::alt_play)
    out.note = "invariant only guaranteed continuous on an open dense set; heuristic near the excluded set";
  return out;
}

OrbitSignature orbit_signature(const State& x, const std::vector<Invariant>& invariants,
                               std::size_t depth) {
  OrbitSignature sig;
  sig.source = x;
  sig.depth = depth;
  for (const Invariant& inv : invariants) {
    const double v = inv(x);
    if (!std::isfinite(v)) throw NumericalError("non-finite invariant value for " + inv.id(), 0);
    sig.invariant_values.emplace_back(inv.id(), v);
  }
  return sig;
}

SameOrbitResult same_orbit(const MapInstance& map, const State& x, const State& y,
                           std::size_t max_iter, double tol, const std::vector<Invariant>& filters,
                           const OrbitOptions& opts) {
  map.check_domain(x);
  map.check_domain(y);
  SameOrbitResult out;

  std::vector<Invariant> active = filters;
  if (active.empty() && map.kind() == MapKind::alt_play)
    active.push_back(Invariant::closed_form(*map.payoff(), map.step_sizes()[0], map.step_sizes()[1]));
  for (const Invariant& inv : active) {
    const double vx = inv(x), vy = inv(y);
    out.phi_x.emplace_back(inv.id(), vx);
    out.phi_y.emplace_back(inv.id(), vy);
    if (std::abs(vx - vy) > tol * (1.0 + std::max(std::abs(vx), std::abs(vy)))) {
      out.verdict = OrbitVerdict::no;
      out.reason = "invariant-filter";
      out.note = "invariant '" + inv.id() + "' separates the points";
      out.closest_distance = distance(x, y);
      return out;
    }
  }

  out.closest_distance = distance(x, y);
  if (out.closest_distance <= tol) {
    out.verdict = OrbitVerdict::yes;
    out.reason = "search";
    return out;
  }
  if (detect_fixed_point(map, x, opts.fixed_point_tolerance) ||
      detect_fixed_point(map, y, opts.fixed_point_tolerance)) {
    out.verdict = OrbitVerdict::no;
    out.reason = "fixed-point";
    out.note = "a fixed point's orbit is the point itself";
    return out;
  }

  State fwd = x, bwd = x;
  bool fwd_alive = true, bwd_alive = map.inverse_strategy() != InverseStrategy::unavailable;
  if (!bwd_alive) {
    out.forward_only = true;
    out.note = "map has no inverse; forward search only";
  }
  auto consider = [&](const State& s, long k) {
    const double d = distance(s, y);
    if (d < out.closest_distance) {
      out.closest_distance = d;
      out.closest_index = k;
    }
    return d <= tol;
  };
  for (std::size_t k = 1; k <= max_iter && (fwd_alive || bwd_alive); ++k) {
    const long ik = static_cast<long>(k);
    if (fwd_alive) {
      fwd = step(map, fwd);
      if (!fwd.coords().allFinite()) {
        fwd_alive = false;
        out.note += (out.note.empty() ? "" : "; ") + std::string("forward orbit overflowed at ") +
                    std::to_string(ik);
      } else if (consider(fwd, ik)) {
        out.verdict = OrbitVerdict::yes;
        out.reason = "search";
        out.index = ik;
        return out;
      }
    }
    if (bwd_alive) {
      try {
        bwd = inverse_step(map, bwd, opts.inverse);
      } catch (const InversionError& e) {
        bwd_alive = false;
        out.forward_only = true;
        out.note += (out.note.empty() ? "" : "; ") + std::string("backward search stopped at ") +
                    std::to_string(-ik) + ": " + e.what();
        continue;
      }
      if (!bwd.coords().allFinite()) {
        bwd_alive = false;
      } else if (consider(bwd, -ik)) {
        out.verdict = OrbitVerdict::yes;
        out.reason = "search";
        out.index = -ik;
        return out;
      }
    }
  }
  out.verdict = OrbitVerdict::inconclusive;
  out.reason = "search";
  return out;
}

}  // namespace orbitlab
