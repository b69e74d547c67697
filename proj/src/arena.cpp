#include "policyshare/arena.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "policyshare/errors.hpp"

namespace policyshare {

namespace {

constexpr double kRotationEpsilon = 1e-12;
// Contacts closer together than this (in tick fractions) resolve together.
constexpr double kSimultaneous = 1e-12;
// Slides slower than this fraction of the forward speed count as blocked.
constexpr double kMinSlideFraction = 0.25;
constexpr long kPlacementBudget = 1'000'000;

// Densest packing of equal disks in the plane.
const double kPackingBound = std::numbers::pi / (2.0 * std::sqrt(3.0));

std::string format_density(double rho) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", rho);
    return buf;
}

// Largest fraction of `disp` the body can travel before its disk reaches a
// wall. Returns a value > 1 when no wall is reached this tick.
double wall_reach(Vec2 start, Vec2 disp, double lo, double hi, double tiny) {
    double reach = 2.0;
    auto axis = [&](double p, double d) {
        if (d > tiny) reach = std::min(reach, (hi - p) / d);
        else if (d < -tiny) reach = std::min(reach, (lo - p) / d);
    };
    axis(start.x, disp.x);
    axis(start.y, disp.y);
    return reach;
}

}  // namespace

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

double ArenaSpec::density() const {
    return static_cast<double>(agent_count) * std::numbers::pi * agent_radius * agent_radius /
           (side_length * side_length);
}

void ArenaSpec::validate() const {
    if (!(agent_radius > 0.0) || !std::isfinite(agent_radius)) {
        throw ConfigError("agent_radius must be positive");
    }
    if (!(side_length > 2.0 * agent_radius) || !std::isfinite(side_length)) {
        throw ConfigError("arena side length must exceed the agent diameter");
    }
    if (agent_count < 1) throw ConfigError("at least one agent is required");
    if (density() >= kPackingBound) {
        throw ConfigError("density " + format_density(density()) +
                          " exceeds the disk packing bound; placement is infeasible");
    }
}

MotionParams MotionParams::defaults_for(double agent_radius) {
    return MotionParams{agent_radius / 10.0, std::numbers::pi / 20.0, agent_radius / 100.0};
}

void MotionParams::validate(const ArenaSpec& spec) const {
    if (!(speed > 0.0) || !(speed < spec.agent_radius)) {
        throw ConfigError("speed must be positive and below the agent radius (no tunneling)");
    }
    if (!(angular_speed > 0.0) || angular_speed > std::numbers::pi / 8.0 + 1e-15) {
        throw ConfigError("angular_speed must lie in (0, pi/8] radians per tick");
    }
    if (!(contact_tolerance > 0.0) || !(contact_tolerance < spec.agent_radius)) {
        throw ConfigError("contact_tolerance must be positive and below the agent radius");
    }
}

double wrap_angle(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double lattice_angle(double theta0, std::uint32_t heading, std::size_t n_sectors) {
    return wrap_angle(theta0 + kTwoPi * static_cast<double>(heading) / static_cast<double>(n_sectors));
}

std::uint32_t sector_of(double phi, std::size_t n_sectors) {
    const double n = static_cast<double>(n_sectors);
    const auto sector = static_cast<std::uint32_t>(std::floor(n * wrap_angle(phi) / kTwoPi));
    return std::min<std::uint32_t>(sector, static_cast<std::uint32_t>(n_sectors - 1));
}

World place_agents(const ArenaSpec& spec, std::size_t n_sectors, const MotionParams& params,
                   RandomStream& rng) {
    spec.validate();
    (void)n_sectors;
    const double r = spec.agent_radius;
    const double lo = r + params.contact_tolerance;
    const double hi = spec.side_length - r - params.contact_tolerance;
    const double min_gap = 2.0 * r + params.contact_tolerance;
    if (!(hi > lo) && spec.agent_count > 0) {
        throw ConfigError("arena too small for a single agent at density " +
                          format_density(spec.density()));
    }

    World world;
    world.reserve(spec.agent_count);
    long attempts = 0;
    while (world.size() < spec.agent_count) {
        if (++attempts > kPlacementBudget) {
            throw ConfigError("could not place " + std::to_string(spec.agent_count) +
                              " non-overlapping agents at density " +
                              format_density(spec.density()) + " within " +
                              std::to_string(kPlacementBudget) + " attempts");
        }
        const Vec2 c{rng.uniform(lo, hi), rng.uniform(lo, hi)};
        if (c.x <= lo || c.y <= lo) continue;
        const bool clear = std::all_of(world.begin(), world.end(), [&](const AgentBody& b) {
            return norm(b.center - c) > min_gap;
        });
        if (!clear) continue;
        AgentBody body;
        body.center = c;
        body.theta0 = rng.uniform(0.0, kTwoPi);
        body.orientation = body.theta0;
        world.push_back(body);
    }
    return world;
}

ContactSet contacts_of(std::size_t agent, const World& world, const ArenaSpec& spec,
                       const MotionParams& params) {
    const AgentBody& self = world.at(agent);
    const double r = spec.agent_radius;
    const double eps = params.contact_tolerance;
    ContactSet out;

    for (std::size_t j = 0; j < world.size(); ++j) {
        if (j == agent) continue;
        const Vec2 d = world[j].center - self.center;
        if (norm(d) <= 2.0 * r + eps) {
            out.push_back({ContactKind::Agent, wrap_angle(std::atan2(d.y, d.x) - self.orientation), j});
        }
    }

    const Vec2 c = self.center;
    const double far = spec.side_length - r;
    auto wall = [&](double clearance, double direction) {
        if (clearance <= eps) {
            out.push_back({ContactKind::Wall, wrap_angle(direction - self.orientation), std::nullopt});
        }
    };
    wall(c.x - r, std::numbers::pi);
    wall(far - c.x, 0.0);
    wall(c.y - r, 1.5 * std::numbers::pi);
    wall(far - c.y, 0.5 * std::numbers::pi);
    return out;
}

std::vector<std::size_t> touching_agents(std::size_t agent, const World& world,
                                         const ArenaSpec& spec, const MotionParams& params) {
    std::vector<std::size_t> out;
    const double reach = 2.0 * spec.agent_radius + params.contact_tolerance;
    const Vec2 c = world.at(agent).center;
    for (std::size_t j = 0; j < world.size(); ++j) {
        if (j != agent && norm(world[j].center - c) <= reach) out.push_back(j);
    }
    return out;
}

StateId sense_state(std::size_t agent, const World& world, const ArenaSpec& spec,
                    const MotionParams& params, std::size_t n_sectors) {
    std::uint32_t bits = 0;
    for (const Contact& contact : contacts_of(agent, world, spec, params)) {
        bits |= 1u << sector_of(contact.bearing, n_sectors);
    }
    return StateId{bits};
}

void begin_forward(AgentBody& body) { body.mode = MotionMode::Moving; }

void begin_rotation(AgentBody& body, std::uint32_t steps, std::size_t n_sectors) {
    const auto n = static_cast<std::uint32_t>(n_sectors);
    steps %= n;
    body.mode = MotionMode::Rotating;
    body.target_heading = (body.heading + steps) % n;
    const double unit = kTwoPi / static_cast<double>(n);
    if (2 * steps > n) {
        body.rotation_direction = -1;
        body.rotation_remaining = unit * static_cast<double>(n - steps);
    } else {
        body.rotation_direction = 1;
        body.rotation_remaining = unit * static_cast<double>(steps);
    }
}

std::vector<CollisionEvent> step_bodies(World& world, const ArenaSpec& spec,
                                        const MotionParams& params, std::size_t n_sectors) {
    const std::size_t m = world.size();
    const double r = spec.agent_radius;
    const double contact_sq = 4.0 * r * r;
    const double lo = r;
    const double hi = spec.side_length - r;
    const double tiny = 1e-12 * params.speed;

    std::vector<Vec2> vel(m);
    std::vector<bool> active(m, false);
    std::vector<double> moved(m, 0.0);  // fraction of the tick spent translating
    std::vector<std::optional<EventKind>> hit(m);

    for (std::size_t i = 0; i < m; ++i) {
        AgentBody& b = world[i];
        if (b.mode == MotionMode::Moving) {
            active[i] = true;
            vel[i] = {params.speed * std::cos(b.orientation), params.speed * std::sin(b.orientation)};
        } else if (b.mode == MotionMode::Rotating) {
            const double turn = std::min(params.angular_speed, b.rotation_remaining);
            b.rotation_remaining -= turn;
            b.orientation = wrap_angle(b.orientation + b.rotation_direction * turn);
            if (b.rotation_remaining <= kRotationEpsilon) {
                b.heading = b.target_heading;
                b.orientation = lattice_angle(b.theta0, b.heading, n_sectors);
                b.rotation_remaining = 0.0;
                b.mode = MotionMode::Idle;
                hit[i] = EventKind::RotationComplete;
            }
        }
    }

    // Existing disk contacts constrain the direction of travel. The mover keeps
    // the tangential part of its velocity; if no single-contact projection
    // satisfies every contact, or the slide is too slow, it is blocked.
    std::vector<std::vector<std::size_t>> resting(m);
    if (params.slide) {
        const double reach_sq = (2.0 * r + params.contact_tolerance) * (2.0 * r + params.contact_tolerance);
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            std::vector<Vec2> normals;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                const Vec2 d = world[j].center - world[i].center;
                const double dd = dot(d, d);
                if (dd > reach_sq) continue;
                resting[i].push_back(j);
                normals.push_back((1.0 / std::sqrt(dd)) * d);
            }
            const Vec2 v = vel[i];
            bool pressed = false;
            for (const Vec2& n : normals) pressed = pressed || dot(v, n) > tiny;
            if (!pressed) continue;
            Vec2 best{};
            double best_sq = -1.0;
            for (const Vec2& n : normals) {
                if (dot(v, n) <= tiny) continue;
                const Vec2 w = v - dot(v, n) * n;
                bool ok = true;
                for (const Vec2& k : normals) ok = ok && dot(w, k) <= tiny;
                if (ok && dot(w, w) > best_sq) {
                    best = w;
                    best_sq = dot(w, w);
                }
            }
            const double floor_speed = kMinSlideFraction * params.speed;
            if (best_sq >= floor_speed * floor_speed) {
                vel[i] = best;
            } else {
                active[i] = false;
                vel[i] = {};
                hit[i] = EventKind::AgentCollision;
            }
        }
    }
    auto resting_pair = [&](std::size_t i, std::size_t j) {
        // Sliding keeps a touching pair from closing while the partner is still.
        auto has = [&](std::size_t a, std::size_t b) {
            return std::binary_search(resting[a].begin(), resting[a].end(), b);
        };
        return (active[i] && !active[j] && has(i, j)) || (active[j] && !active[i] && has(j, i));
    };

    auto mark_struck = [&](std::size_t i) {
        // A turning agent that is struck keeps turning; its event is the
        // rotation completing.
        if (world[i].mode == MotionMode::Rotating) return;
        if (!hit[i] || *hit[i] == EventKind::RotationComplete) hit[i] = EventKind::AgentCollision;
    };

    // Sweep the tick in time order: advance every mover to the earliest wall
    // or disk contact, stop the agents involved, repeat. Each round stops at
    // least one mover, so m + 1 rounds always suffice.
    double now = 0.0;
    std::size_t rounds = 0;
    while (true) {
        if (++rounds > m + 2) {
            throw PhysicsError("collision sweep did not terminate after " + std::to_string(rounds) +
                               " rounds");
        }
        const double remaining = 1.0 - now;
        double first = remaining;
        std::vector<std::size_t> wall_stops;
        std::vector<std::pair<std::size_t, std::size_t>> pair_stops;

        auto consider = [&](double t) {
            if (t < first - kSimultaneous) {
                first = t;
                wall_stops.clear();
                pair_stops.clear();
                return true;
            }
            return t <= first + kSimultaneous;
        };

        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            const double t = std::max(0.0, wall_reach(world[i].center, vel[i], lo, hi, tiny));
            if (t <= remaining && consider(t)) wall_stops.push_back(i);
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                if (!active[i] && !active[j]) continue;
                if (resting_pair(i, j)) continue;
                const Vec2 rel = world[i].center - world[j].center;
                const Vec2 u = (active[i] ? vel[i] : Vec2{}) - (active[j] ? vel[j] : Vec2{});
                const double approach = dot(rel, u);
                if (approach >= 0.0) continue;
                const double uu = dot(u, u);
                const double gap = dot(rel, rel) - contact_sq;
                double t = 0.0;
                if (gap > 0.0) {
                    const double disc = approach * approach - uu * gap;
                    if (disc < 0.0) continue;
                    t = std::max(0.0, (-approach - std::sqrt(disc)) / uu);
                }
                if (t <= remaining && consider(t)) pair_stops.emplace_back(i, j);
            }
        }

        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            world[i].center = world[i].center + first * vel[i];
            moved[i] += first;
        }
        now += first;
        if (wall_stops.empty() && pair_stops.empty()) break;

        for (std::size_t i : wall_stops) {
            if (!active[i]) continue;
            active[i] = false;
            if (!hit[i]) hit[i] = EventKind::WallCollision;
        }
        for (auto [i, j] : pair_stops) {
            active[i] = false;
            active[j] = false;
            mark_struck(i);
            mark_struck(j);
        }
        for (std::size_t i = 0; i < m; ++i) {
            // Clamp the last ulps so containment holds exactly.
            world[i].center.x = std::clamp(world[i].center.x, lo, hi);
            world[i].center.y = std::clamp(world[i].center.y, lo, hi);
        }
        if (now >= 1.0) break;
    }

    std::vector<CollisionEvent> events;
    for (std::size_t i = 0; i < m; ++i) {
        AgentBody& b = world[i];
        if (b.mode == MotionMode::Moving) {
            b.cumulative_distance += std::min(moved[i], 1.0) * norm(vel[i]);
            if (hit[i]) b.mode = MotionMode::Idle;
        }
        if (hit[i]) events.push_back({i, *hit[i]});
    }
    return events;
}

}  // namespace policyshare
