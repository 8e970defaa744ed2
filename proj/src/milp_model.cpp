#include "mbr/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace mbr {

bool ModelContext::add_row(LinearConstraint c) {
  if (c.tag.empty()) throw Error("constraint without tag");
  if (!row_tags.insert(c.tag).second) return false;
  backend->add_constraint(c);
  rows.push_back(std::move(c));
  return true;
}

void ModelContext::dump(std::ostream& os) const {
  for (const auto& r : rows) {
    os << r.tag << " | ";
    for (size_t i = 0; i < r.terms.size(); ++i) {
      if (i) os << " + ";
      os << r.terms[i].second << "*v" << r.terms[i].first;
    }
    os << " | "
       << (r.sense == Sense::LE ? "<=" : r.sense == Sense::EQ ? "==" : ">=")
       << " | " << r.rhs << "\n";
  }
}

double big_M(const Instance& inst, int train) {
  return inst.demand(train).exit_hi;
}

namespace {

std::string tr_id(const ModelContext& ctx, int t) {
  return ctx.inst->trains[t].id;
}
std::string edge_id(const ModelContext& ctx, int e) {
  return ctx.inst->network.edges[e].id;
}
std::string vx_id(const ModelContext& ctx, int v) {
  return ctx.inst->network.vertices[v];
}

// Reachability over the extended graph from the entry state.
bool exit_reachable(const ExtendedGraph& g, const Network& net, int v_in,
                    int entry_speed_idx, int v_out) {
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> stack{{v_in, entry_speed_idx}};
  seen.insert(stack[0]);
  while (!stack.empty()) {
    auto [v, s] = stack.back();
    stack.pop_back();
    if (v == v_out) return true;
    for (int xe : g.out_ext[v]) {
      const ExtendedEdge& e = g.edges[xe];
      if (e.s1 != s) continue;
      auto nxt = std::make_pair(net.edges[e.base_edge].to, e.s2);
      if (seen.insert(nxt).second) stack.push_back(nxt);
    }
  }
  return false;
}

void build_train_vars(ModelContext& ctx, int t) {
  const ExtendedGraph& g = ctx.graph(t);
  const Network& net = ctx.inst->network;
  const Demand& dem = ctx.inst->demand(t);
  TrainVars& tv = ctx.vars.trains[t];

  std::set<int> vset{dem.entry_vertex, dem.exit_vertex};
  for (size_t e = 0; e < net.edges.size(); ++e) {
    if (!g.edge_usable[e]) continue;
    tv.x[static_cast<int>(e)] = ctx.backend->add_binary();
    vset.insert(net.edges[e].from);
    vset.insert(net.edges[e].to);
  }
  tv.y.assign(g.edges.size(), -1);
  for (size_t xe = 0; xe < g.edges.size(); ++xe)
    tv.y[xe] = ctx.backend->add_binary();
  const double ub = big_M(*ctx.inst, t);
  for (int v : vset) {
    tv.a_front[v] = ctx.backend->add_continuous(0, ub);
    tv.d_front[v] = ctx.backend->add_continuous(0, ub);
    tv.d_rear[v] = ctx.backend->add_continuous(0, ub);
    tv.vertices.push_back(v);
  }
  std::sort(tv.vertices.begin(), tv.vertices.end());
}

// Extended edges incident to (v, speed 0) — the stop indicator sum.
std::vector<int> speed_zero_incident(const ExtendedGraph& g, int v) {
  std::vector<int> out;
  for (int xe : g.in_ext[v])
    if (g.edges[xe].p2 < 1e-9) out.push_back(xe);
  for (int xe : g.out_ext[v])
    if (g.edges[xe].p1 < 1e-9) out.push_back(xe);
  return out;
}

void build_train_rows(ModelContext& ctx, int t) {
  const ExtendedGraph& g = ctx.graph(t);
  const Network& net = ctx.inst->network;
  const Demand& dem = ctx.inst->demand(t);
  const Train& tr = ctx.inst->trains[t];
  TrainVars& tv = ctx.vars.trains[t];
  const double M = big_M(*ctx.inst, t);

  const int entry_speed_idx =
      g.speed_sets[dem.entry_vertex].index_of(dem.entry_speed_mps);
  if (entry_speed_idx < 0)
    throw InstanceError("train '" + tr.id +
                        "': entry speed is not attainable at the entry vertex");
  if (!exit_reachable(g, net, dem.entry_vertex, entry_speed_idx,
                      dem.exit_vertex))
    throw InstanceError("train '" + tr.id +
                        "' has no entry->exit path in its extended graph");

  // boundary flow: exactly one departure from the entry, one arrival at exit
  {
    LinearConstraint c;
    for (int e : net.out_edges[dem.entry_vertex])
      if (tv.x.count(e)) c.terms.push_back({tv.x[e], 1.0});
    c.sense = Sense::EQ;
    c.rhs = 1;
    c.tag = "entry-edge|" + tr.id;
    if (c.terms.empty())
      throw InstanceError("train '" + tr.id + "' cannot leave its entry vertex");
    ctx.add_row(std::move(c));
  }
  {
    LinearConstraint c;
    for (int xe : g.out_ext[dem.entry_vertex])
      if (g.edges[xe].s1 == entry_speed_idx)
        c.terms.push_back({tv.y[xe], 1.0});
    c.sense = Sense::EQ;
    c.rhs = 1;
    c.tag = "entry-speed|" + tr.id;
    ctx.add_row(std::move(c));
  }
  {
    LinearConstraint c;
    for (int e : net.in_edges[dem.exit_vertex])
      if (tv.x.count(e)) c.terms.push_back({tv.x[e], 1.0});
    c.sense = Sense::EQ;
    c.rhs = 1;
    c.tag = "exit-edge|" + tr.id;
    if (c.terms.empty())
      throw InstanceError("train '" + tr.id + "' cannot reach its exit vertex");
    ctx.add_row(std::move(c));
  }

  // speed-aware flow conservation at interior (vertex, speed) states
  for (int v : tv.vertices) {
    if (v == dem.entry_vertex || v == dem.exit_vertex) continue;
    const SpeedSet& ss = g.speed_sets[v];
    for (size_t s = 0; s < ss.speeds.size(); ++s) {
      LinearConstraint c;
      for (int xe : g.in_ext[v])
        if (g.edges[xe].s2 == static_cast<int>(s))
          c.terms.push_back({tv.y[xe], 1.0});
      for (int xe : g.out_ext[v])
        if (g.edges[xe].s1 == static_cast<int>(s))
          c.terms.push_back({tv.y[xe], -1.0});
      if (c.terms.empty()) continue;
      c.sense = Sense::EQ;
      c.rhs = 0;
      c.tag = "flow|" + tr.id + "|" + vx_id(ctx, v) + "|" +
              std::to_string(s);
      ctx.add_row(std::move(c));
    }
  }

  // cycle prevention: per-vertex degree bounds on x
  for (int v : tv.vertices) {
    LinearConstraint cin, cout;
    for (int e : net.in_edges[v])
      if (tv.x.count(e)) cin.terms.push_back({tv.x[e], 1.0});
    for (int e : net.out_edges[v])
      if (tv.x.count(e)) cout.terms.push_back({tv.x[e], 1.0});
    if (!cin.terms.empty()) {
      cin.sense = Sense::LE;
      cin.rhs = 1;
      cin.tag = "deg-in|" + tr.id + "|" + vx_id(ctx, v);
      ctx.add_row(std::move(cin));
    }
    if (!cout.terms.empty()) {
      cout.sense = Sense::LE;
      cout.rhs = 1;
      cout.tag = "deg-out|" + tr.id + "|" + vx_id(ctx, v);
      ctx.add_row(std::move(cout));
    }
  }

  // x_e = sum of the edge's velocity extensions
  for (auto& [e, xvar] : tv.x) {
    LinearConstraint c;
    c.terms.push_back({xvar, 1.0});
    for (int xe : g.ext_of_edge[e]) c.terms.push_back({tv.y[xe], -1.0});
    c.sense = Sense::EQ;
    c.rhs = 0;
    c.tag = "link|" + tr.id + "|" + edge_id(ctx, e);
    ctx.add_row(std::move(c));
  }

  // travel-time bounds per extended edge
  for (size_t xe = 0; xe < g.edges.size(); ++xe) {
    const ExtendedEdge& ee = g.edges[xe];
    const int u = net.edges[ee.base_edge].from;
    const int v = net.edges[ee.base_edge].to;
    const std::string key = tr_id(ctx, t) + "|" + edge_id(ctx, ee.base_edge) +
                            "|" + std::to_string(ee.s1) + ">" +
                            std::to_string(ee.s2);
    {
      // a_v >= d_u + tau_min - M'(1 - y), M' wide enough to release the row
      const double Mr = M + ee.tau_min;
      LinearConstraint c;
      c.terms = {{tv.a_front[v], 1.0}, {tv.d_front[u], -1.0},
                 {tv.y[xe], -Mr}};
      c.sense = Sense::GE;
      c.rhs = ee.tau_min - Mr;
      c.tag = "mintime|" + key;
      ctx.add_row(std::move(c));
    }
    if (ee.tau_max <= M) {  // otherwise bounding has no effect
      LinearConstraint c;
      c.terms = {{tv.a_front[v], 1.0}, {tv.d_front[u], -1.0}, {tv.y[xe], M}};
      c.sense = Sense::LE;
      c.rhs = ee.tau_max + M;
      c.tag = "maxtime|" + key;
      ctx.add_row(std::move(c));
    }
  }

  // departures follow arrivals; dwell requires a zero-speed extension
  for (int v : tv.vertices) {
    {
      LinearConstraint c;
      c.terms = {{tv.d_front[v], 1.0}, {tv.a_front[v], -1.0}};
      c.sense = Sense::GE;
      c.rhs = 0;
      c.tag = "dwell-lb|" + tr.id + "|" + vx_id(ctx, v);
      ctx.add_row(std::move(c));
    }
    {
      LinearConstraint c;
      c.terms = {{tv.d_front[v], 1.0}, {tv.a_front[v], -1.0}};
      for (int xe : speed_zero_incident(g, v))
        c.terms.push_back({tv.y[xe], -M});
      c.sense = Sense::LE;
      c.rhs = 0;
      c.tag = "dwell-speed0|" + tr.id + "|" + vx_id(ctx, v);
      ctx.add_row(std::move(c));
    }
    {
      LinearConstraint c;
      c.terms = {{tv.d_rear[v], 1.0}, {tv.d_front[v], -1.0}};
      c.sense = Sense::GE;
      c.rhs = 0;
      c.tag = "rear-front|" + tr.id + "|" + vx_id(ctx, v);
      ctx.add_row(std::move(c));
    }
  }

  // entry / exit windows
  auto bound_row = [&](int var, Sense s, double rhs, const std::string& tag) {
    LinearConstraint c;
    c.terms = {{var, 1.0}};
    c.sense = s;
    c.rhs = rhs;
    c.tag = tag;
    ctx.add_row(std::move(c));
  };
  bound_row(tv.a_front[dem.entry_vertex], Sense::GE, dem.entry_lo,
            "entry-lo|" + tr.id);
  bound_row(tv.a_front[dem.entry_vertex], Sense::LE, dem.entry_hi,
            "entry-hi|" + tr.id);
  bound_row(tv.d_rear[dem.exit_vertex], Sense::GE, dem.exit_lo,
            "exit-lo|" + tr.id);
  bound_row(tv.d_rear[dem.exit_vertex], Sense::LE, dem.exit_hi,
            "exit-hi|" + tr.id);
}

}  // namespace

void add_track_release(ModelContext& ctx, int t) {
  const ExtendedGraph& g = ctx.graph(t);
  const Network& net = ctx.inst->network;
  const Train& tr = ctx.inst->trains[t];
  const Demand& dem = ctx.inst->demand(t);
  TrainVars& tv = ctx.vars.trains[t];
  const double M = big_M(*ctx.inst, t);

  struct Cover {
    std::vector<int> edges;
    bool full = false;  // covered the train length (else: ends at the exit)
    double s = 0;       // offset into the last edge when full
  };

  for (int u1 : tv.vertices) {
    std::vector<Cover> covers;
    // Minimal forward sequences from u1 over usable edges.
    std::function<void(int, std::vector<int>&, double)> dfs =
        [&](int v, std::vector<int>& path, double acc) {
          if (static_cast<int>(covers.size()) > ctx.cfg.max_release_paths)
            throw EnumerationLimitExceeded(
                "track-release enumeration exceeded max_release_paths at "
                "vertex '" + vx_id(ctx, u1) + "' for train '" + tr.id + "'");
          bool extended = false;
          for (int e : net.out_edges[v]) {
            if (!tv.x.count(e)) continue;
            // a simple path cannot reuse a vertex
            if (std::any_of(path.begin(), path.end(), [&](int pe) {
                  return net.edges[pe].from == net.edges[e].to;
                }) || net.edges[e].to == u1)
              continue;
            extended = true;
            path.push_back(e);
            const double len = net.edges[e].length_m;
            if (acc + len >= tr.length_m - 1e-9) {
              covers.push_back({path, true, tr.length_m - acc});
            } else if (net.edges[e].to == dem.exit_vertex) {
              covers.push_back({path, false, 0});
            } else {
              dfs(net.edges[e].to, path, acc + len);
            }
            path.pop_back();
          }
          (void)extended;
        };
    std::vector<int> path;
    dfs(u1, path, 0);

    for (const Cover& cov : covers) {
      std::string seq;
      for (int e : cov.edges) seq += edge_id(ctx, e) + ".";
      const int k = static_cast<int>(cov.edges.size());
      if (!cov.full) {
        // Remaining route shorter than the train: the rear cannot clear u1
        // before the front departs the network exit.
        LinearConstraint c;
        c.terms = {{tv.d_rear[u1], 1.0},
                   {tv.d_front[dem.exit_vertex], -1.0}};
        for (int e : cov.edges) c.terms.push_back({tv.x[e], -M});
        c.sense = Sense::GE;
        c.rhs = -M * k;
        c.tag = "release-exit|" + tr.id + "|" + vx_id(ctx, u1) + "|" + seq;
        ctx.add_row(std::move(c));
        continue;
      }
      const int ek = cov.edges.back();
      const Edge& ek_edge = net.edges[ek];
      const auto params = g.edge_params(*ctx.inst, ek);
      const int uk = ek_edge.from;
      const int vk = ek_edge.to;
      // A: rear passes u1 once the front has run s meters into the last edge
      {
        double tau_max_term = 0;
        LinearConstraint c;
        c.terms = {{tv.d_rear[u1], 1.0}, {tv.d_front[uk], -1.0}};
        for (int xe : g.ext_of_edge[ek]) {
          const ExtendedEdge& ee = g.edges[xe];
          const double tau = kin::min_time_over_interval(
              ek_edge.length_m, ee.p1, ee.p2, 0, cov.s, params);
          tau_max_term = std::max(tau_max_term, tau);
          c.terms.push_back({tv.y[xe], -tau});
        }
        const double Mr = M + tau_max_term;
        for (int e : cov.edges) c.terms.push_back({tv.x[e], -Mr});
        c.sense = Sense::GE;
        c.rhs = -Mr * k;
        c.tag = "release-a|" + tr.id + "|" + vx_id(ctx, u1) + "|" + seq;
        ctx.add_row(std::move(c));
      }
      // B: anchored on the arrival at the last edge's head
      if (!ek_edge.stop_allowed) {
        LinearConstraint c;
        c.terms = {{tv.d_rear[u1], 1.0}, {tv.a_front[vk], -1.0}};
        for (int xe : g.ext_of_edge[ek]) {
          const ExtendedEdge& ee = g.edges[xe];
          const double tau = kin::max_time_over_interval(
              ek_edge.length_m, ee.p1, ee.p2, cov.s, ek_edge.length_m,
              ek_edge.stop_allowed, params);
          c.terms.push_back({tv.y[xe], tau});
        }
        for (int e : cov.edges) c.terms.push_back({tv.x[e], -M});
        c.sense = Sense::GE;
        c.rhs = -M * k;
        c.tag = "release-b|" + tr.id + "|" + vx_id(ctx, u1) + "|" + seq;
        ctx.add_row(std::move(c));
      }
    }
  }
}

void add_timetable(ModelContext& ctx, int t) {
  const ExtendedGraph& g = ctx.graph(t);
  const Train& tr = ctx.inst->trains[t];
  const Demand& dem = ctx.inst->demand(t);
  TrainVars& tv = ctx.vars.trains[t];
  const double M = big_M(*ctx.inst, t);

  std::vector<std::vector<int>> cand(dem.stops.size());
  for (size_t i = 0; i < dem.stops.size(); ++i) {
    const StopRequest& sr = dem.stops[i];
    auto it = g.stop_vertices.find(sr.station);
    if (it != g.stop_vertices.end())
      for (int v : it->second)
        if (tv.a_front.count(v)) cand[i].push_back(v);
    if (cand[i].empty())
      throw UnsatisfiableStop("train '" + tr.id + "' stop " +
                              std::to_string(i) + " at station '" +
                              sr.station + "' has no feasible vertex");
    for (int v : cand[i])
      tv.stop[{static_cast<int>(i), v}] = ctx.backend->add_binary();
  }

  for (size_t i = 0; i < dem.stops.size(); ++i) {
    const StopRequest& sr = dem.stops[i];
    const std::string base = tr.id + "|" + std::to_string(i);
    {
      LinearConstraint c;
      for (int v : cand[i])
        c.terms.push_back({tv.stop[{static_cast<int>(i), v}], 1.0});
      c.sense = Sense::EQ;
      c.rhs = 1;
      c.tag = "stop-choose|" + base;
      ctx.add_row(std::move(c));
    }
    for (int v : cand[i]) {
      const int sv = tv.stop[{static_cast<int>(i), v}];
      const std::string vb = base + "|" + vx_id(ctx, v);
      auto implied = [&](int tvar, Sense sense, double bound, double Mr,
                         const std::string& tag) {
        LinearConstraint c;
        c.terms = {{tvar, 1.0},
                   {sv, sense == Sense::GE ? -Mr : Mr}};
        c.sense = sense;
        c.rhs = sense == Sense::GE ? bound - Mr : bound + Mr;
        c.tag = tag;
        ctx.add_row(std::move(c));
      };
      implied(tv.a_front[v], Sense::GE, sr.arrival_lo,
              std::max(M, sr.arrival_lo), "stop-arr-lo|" + vb);
      implied(tv.a_front[v], Sense::LE, sr.arrival_hi, M, "stop-arr-hi|" + vb);
      implied(tv.d_front[v], Sense::GE, sr.departure_lo,
              std::max(M, sr.departure_lo), "stop-dep-lo|" + vb);
      implied(tv.d_front[v], Sense::LE, sr.departure_hi, M,
              "stop-dep-hi|" + vb);
      {
        LinearConstraint c;
        const double Mr = std::max(M, sr.min_dwell_s);
        c.terms = {{tv.d_front[v], 1.0}, {tv.a_front[v], -1.0}, {sv, -Mr}};
        c.sense = Sense::GE;
        c.rhs = sr.min_dwell_s - Mr;
        c.tag = "stop-dwell|" + vb;
        ctx.add_row(std::move(c));
      }
      {
        // the stop vertex must be visited at speed zero on the used route
        LinearConstraint c;
        c.terms = {{sv, 1.0}};
        for (int xe : speed_zero_incident(g, v))
          c.terms.push_back({tv.y[xe], -1.0});
        c.sense = Sense::LE;
        c.rhs = 0;
        c.tag = "stop-on-route|" + vb;
        ctx.add_row(std::move(c));
      }
    }
    if (i > 0) {
      for (int v : cand[i - 1]) {
        for (int w : cand[i]) {
          if (v == w) continue;  // same-vertex consecutive stops share a dwell
          LinearConstraint c;
          c.terms = {{tv.a_front[w], 1.0},
                     {tv.d_front[v], -1.0},
                     {tv.stop[{static_cast<int>(i) - 1, v}], -M},
                     {tv.stop[{static_cast<int>(i), w}], -M}};
          c.sense = Sense::GE;
          c.rhs = -2 * M;
          c.tag = "stop-order|" + base + "|" + vx_id(ctx, v) + ">" +
                  vx_id(ctx, w);
          ctx.add_row(std::move(c));
        }
      }
    }
  }
}

void set_objective(ModelContext& ctx) {
  const Instance& inst = *ctx.inst;
  double wsum = 0;
  for (const Demand& d : inst.demands) wsum += d.weight;
  std::vector<std::pair<int, double>> terms;
  double offset = 0;
  const size_t n = inst.trains.size();
  for (size_t t = 0; t < n; ++t) {
    const Demand& d = inst.demand(static_cast<int>(t));
    const double w = wsum > 0 ? d.weight / wsum
                              : (n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    if (w == 0) continue;
    terms.push_back(
        {ctx.vars.trains[t].d_rear.at(d.exit_vertex), w});
    offset -= w * d.exit_lo;
  }
  ctx.backend->set_objective(terms, offset);
}

void build_base_model(ModelContext& ctx) {
  ctx.cfg.validate();
  const size_t n = ctx.inst->trains.size();
  ctx.vars.trains.resize(n);
  for (size_t t = 0; t < n; ++t) build_train_vars(ctx, static_cast<int>(t));
  for (size_t t = 0; t < n; ++t) {
    build_train_rows(ctx, static_cast<int>(t));
    add_track_release(ctx, static_cast<int>(t));
    add_timetable(ctx, static_cast<int>(t));
  }
  set_objective(ctx);
}

}  // namespace mbr
