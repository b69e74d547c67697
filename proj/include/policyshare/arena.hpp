#pragma once

// Disk agents in a square arena [0, L]^2: placement, fixed-step kinematics
// with completely inelastic collisions, contact detection and the sensor
// wedge state encoding.

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "policyshare/random.hpp"
#include "policyshare/rl_core.hpp"

namespace policyshare {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a);

struct ArenaSpec {
    double side_length = 150.0;
    double agent_radius = 10.0;
    std::size_t agent_count = 20;

    // Fraction of the arena covered by agent disks: M * pi * R^2 / L^2.
    double density() const;
    void validate() const;
};

struct MotionParams {
    double speed = 1.0;             // world units per tick
    double angular_speed = 0.0;     // radians per tick
    double contact_tolerance = 0.1; // world units
    // Smooth disks: a mover pressed against a disk it already touches slides
    // along it instead of stopping. Off gives the plain full-stop model.
    bool slide = true;

    // v = R/10, omega = pi/20, contact tolerance = R/100.
    static MotionParams defaults_for(double agent_radius);
    void validate(const ArenaSpec& spec) const;
};

enum class MotionMode : std::uint8_t { Idle, Moving, Rotating };

struct AgentBody {
    Vec2 center;
    double theta0 = 0.0;        // initial orientation, anchors the heading lattice
    std::uint32_t heading = 0;  // lattice index: orientation = theta0 + 2*pi*heading/N
    double orientation = 0.0;   // current angle in [0, 2*pi)
    MotionMode mode = MotionMode::Idle;

    // Valid while Rotating.
    std::uint32_t target_heading = 0;
    int rotation_direction = 1;      // +1 counterclockwise, -1 clockwise
    double rotation_remaining = 0.0; // radians left to turn

    double cumulative_distance = 0.0;
};

using World = std::vector<AgentBody>;

// Wraps any finite angle into [0, 2*pi).
double wrap_angle(double phi);

double lattice_angle(double theta0, std::uint32_t heading, std::size_t n_sectors);

// floor(N * wrap(phi) / 2pi), clamped into [0, N-1].
std::uint32_t sector_of(double phi, std::size_t n_sectors);

World place_agents(const ArenaSpec& spec, std::size_t n_sectors, const MotionParams& params,
                   RandomStream& rng);

enum class ContactKind : std::uint8_t { Wall, Agent };

struct Contact {
    ContactKind kind;
    double bearing;  // counterclockwise from the agent's orientation, in [0, 2*pi)
    std::optional<std::size_t> other;
};

using ContactSet = std::vector<Contact>;

ContactSet contacts_of(std::size_t agent, const World& world, const ArenaSpec& spec,
                       const MotionParams& params);

// Indices of agents touching `agent`, ascending.
std::vector<std::size_t> touching_agents(std::size_t agent, const World& world,
                                         const ArenaSpec& spec, const MotionParams& params);

StateId sense_state(std::size_t agent, const World& world, const ArenaSpec& spec,
                    const MotionParams& params, std::size_t n_sectors);

// Starts a forward move along the current orientation.
void begin_forward(AgentBody& body);

// Starts turning by 2*pi*steps/N along the shorter arc (a half turn goes
// counterclockwise). A zero-step rotation completes on the next tick.
void begin_rotation(AgentBody& body, std::uint32_t steps, std::size_t n_sectors);

enum class EventKind : std::uint8_t { WallCollision, AgentCollision, RotationComplete };

struct CollisionEvent {
    std::size_t agent;
    EventKind kind;
};

// Advances every body by one tick. Returns at most one event per agent,
// ordered by agent index.
std::vector<CollisionEvent> step_bodies(World& world, const ArenaSpec& spec,
                                        const MotionParams& params, std::size_t n_sectors);

}  // namespace policyshare
