#pragma once

#include "relnewt/model.hpp"
#include "relnewt/ode.hpp"
#include "relnewt/vec.hpp"

namespace relnewt {

/** Fixed energy level for one experiment. Energies are total, including the rest
    term, so admissibility means E > c^2 + sup V. */
struct EnergyContext {
    double energy = 2.0;
    double light_speed = 1.0;
    int dim = 2;

    double rest_energy() const { return light_speed * light_speed; }

    /** Validating factory: requires E > c^2 + sup V for the given potential. */
    static EnergyContext make(double energy, double light_speed, const PotentialModel& model);

    /** On shell momentum magnitude at potential value V, equals the conformal
        metric weight. Throws BelowShell when E - V <= c^2. */
    double shell_momentum(double V) const;

    /** On shell speed at potential value V, strictly below c. */
    double shell_speed(double V) const;

    /** Speed on the energy shell where the potential vanishes. */
    double asymptotic_speed() const { return shell_speed(0.0); }
};

/** Throws BelowShell unless E > c^2 + sup V. */
void require_admissible(const EnergyContext& ctx, const PotentialModel& model);

struct PhaseState {
    Vec x;
    Vec p;
};

/** Velocity of momentum p, |v| < c always. */
Vec velocity_of(const Vec& p, double light_speed);

/** Momentum of velocity v. Throws BelowShell for |v| >= c. */
Vec momentum_of(const Vec& v, double light_speed);

/** Total energy c^2 sqrt(1 + |p|^2/c^2) + V(x). */
double hamiltonian(const EnergyContext& ctx, const PotentialModel& model, const PhaseState& s);

/** Where an integration should stop. Event kinds terminate on an outward crossing
    of the named surface, located on the dense output. */
struct StopCondition {
    enum class Kind { time, domain_exit, support_exit };
    Kind kind = Kind::time;
    double time = 0.0;                     // target time for Kind::time
    const ConvexDomain* domain = nullptr;  // surface for Kind::domain_exit
    double t_cap = 0.0;                    // cap for event kinds, 0 picks a default

    static StopCondition at_time(double t) {
        StopCondition s; s.kind = Kind::time; s.time = t; return s;
    }
    static StopCondition on_domain_exit(const ConvexDomain& d, double cap = 0.0) {
        StopCondition s; s.kind = Kind::domain_exit; s.domain = &d; s.t_cap = cap; return s;
    }
    static StopCondition on_support_exit(double cap = 0.0) {
        StopCondition s; s.kind = Kind::support_exit; s.t_cap = cap; return s;
    }
};

/** One integrated orbit: accepted samples, dense interpolant, energy bookkeeping.
    State layout is [x, p]. */
class Trajectory {
public:
    Trajectory(EnergyContext ctx, OdeSolution sol, const PotentialModel& model);

    const EnergyContext& context() const { return ctx_; }
    const OdeSolution& solution() const { return sol_; }
    int dim() const { return ctx_.dim; }

    int samples() const { return sol_.samples(); }
    double time(int i) const { return sol_.time(i); }
    PhaseState state(int i) const;
    PhaseState eval(double t) const;
    PhaseState initial_state() const { return state(0); }
    PhaseState final_state() const { return state(samples() - 1); }
    double t_start() const { return sol_.t_start(); }
    double t_end() const { return sol_.t_end(); }
    double duration() const { return sol_.duration(); }
    StopReason stop_reason() const { return sol_.reason; }

    /** Energy of the initial state, the conserved reference. */
    double energy_reference() const { return h0_; }
    /** Max |H - H(0)| over the accepted samples. */
    double max_drift() const { return drift_; }
    /** Drift admissibility at a per unit time tolerance. */
    bool drift_within(double tol_per_unit_time) const {
        return drift_ <= tol_per_unit_time * std::max(1.0, std::abs(duration()));
    }

private:
    EnergyContext ctx_;
    OdeSolution sol_;
    double h0_ = 0.0;
    double drift_ = 0.0;
};

/** Integrate the equation of motion dx/dt = p / sqrt(1 + |p|^2/c^2), dp/dt = -grad V
    from the given state. t0 shifts the time axis only. Event stops locate the
    terminal point on the dense output; reaching the cap first throws EventNotFound. */
Trajectory integrate(const EnergyContext& ctx, const PotentialModel& model,
                     const PhaseState& start, const StopCondition& stop,
                     const OdeOptions& opts = {}, double t0 = 0.0);

/** Same integration into a caller owned buffer, for hot loops that run many
    solves and only inspect raw samples. */
void integrate_raw(const EnergyContext& ctx, const PotentialModel& model,
                   const PhaseState& start, const StopCondition& stop,
                   const OdeOptions& opts, double t0, OdeSolution& out);

/** Search the smallest sampled energy in (e_lo, e_hi] whose boundary value problem
    diagnostics all pass: convex boundary in the conformal metric, unique monotone
    shooting solutions, no conjugate points along sampled chords. Bisection assumes
    the diagnostics are monotone in energy. Throws ThresholdNotFound when the top
    of the range fails. */
double estimate_energy_threshold(const PotentialModel& model, const ConvexDomain& domain,
                                 double e_lo, double e_hi, double light_speed = 1.0,
                                 int probes = 12, unsigned seed = 2026, double rel_gap = 0.01);

} // namespace relnewt
