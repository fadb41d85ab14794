#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "relnewt/errors.hpp"

namespace relnewt {

/** Largest ODE state handled (phase space of dim 3 mechanics plus augmentation). */
constexpr int kMaxOdeDim = 8;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 means choose automatically
    double max_step = 0.0;      // 0 means unlimited
    long max_steps = 2000000;
};

enum class StopReason { time_reached, event };

/** Accepted samples of one integration plus the per step dense interpolant.
    Buffers grow only, callers reuse one instance across many solves. */
class OdeSolution {
public:
    int dim = 0;
    StopReason reason = StopReason::time_reached;
    long n_steps = 0;
    long n_rejected = 0;

    void clear(int d) {
        dim = d;
        reason = StopReason::time_reached;
        n_steps = n_rejected = 0;
        t_.clear();
        y_.clear();
        step_t_.clear();
        step_h_.clear();
        coef_.clear();
    }

    int samples() const { return static_cast<int>(t_.size()); }
    int steps() const { return static_cast<int>(step_t_.size()); }
    double time(int i) const { return t_[static_cast<std::size_t>(i)]; }
    const double* state(int i) const { return y_.data() + static_cast<std::size_t>(i) * dim; }
    double t_start() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    double duration() const { return t_.back() - t_.front(); }

    void push_sample(double t, const double* y) {
        t_.push_back(t);
        y_.insert(y_.end(), y, y + dim);
    }

    void push_step(double t0, double h, const double* rcont) {
        step_t_.push_back(t0);
        step_h_.push_back(h);
        coef_.insert(coef_.end(), rcont, rcont + 5 * dim);
    }

    /** Step index whose dense interpolant covers time t. */
    int step_index(double t) const {
        int lo = 0, hi = steps() - 1;
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (step_t_[static_cast<std::size_t>(mid)] <= t) lo = mid; else hi = mid - 1;
        }
        return lo;
    }

    /** Dense output state at time t inside the integrated range. */
    void eval(double t, double* out) const {
        int k = step_index(t);
        double h = step_h_[static_cast<std::size_t>(k)];
        double th = (t - step_t_[static_cast<std::size_t>(k)]) / h;
        th = std::clamp(th, 0.0, 1.0);
        eval_step(k, th, out);
    }

    /** Dense output at local parameter th in [0, 1] of step k. */
    void eval_step(int k, double th, double* out) const {
        const double* rc = coef_.data() + static_cast<std::size_t>(k) * 5 * dim;
        double th1 = 1.0 - th;
        for (int i = 0; i < dim; ++i) {
            const double* c = rc + 5 * i;
            out[i] = c[0] + th * (c[1] + th1 * (c[2] + th * (c[3] + th1 * c[4])));
        }
    }

    double step_start(int k) const { return step_t_[static_cast<std::size_t>(k)]; }
    double step_size(int k) const { return step_h_[static_cast<std::size_t>(k)]; }

private:
    std::vector<double> t_;
    std::vector<double> y_;
    std::vector<double> step_t_;
    std::vector<double> step_h_;
    std::vector<double> coef_;  // 5 * dim per step, component blocks of 5
};

namespace ode_detail {

// Dormand Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using Buf = std::array<double, kMaxOdeDim>;

/** Bracketed root of a scalar function on [a, b] with f(a) <= 0 < f(b), by the
    Illinois variant of regula falsi with bisection fallback. */
template <class F>
double bracketed_root(const F& f, double a, double b, double fa, double fb) {
    double side_a = fa, side_b = fb;
    for (int it = 0; it < 120; ++it) {
        double m;
        double den = side_b - side_a;
        if (den != 0.0) {
            m = b - side_b * (b - a) / den;
            if (!(m > std::min(a, b) && m < std::max(a, b))) m = 0.5 * (a + b);
        } else {
            m = 0.5 * (a + b);
        }
        double fm = f(m);
        if (std::abs(fm) <= 1e-13 || std::abs(b - a) <= 1e-15) return m;
        if (fm > 0.0) {
            b = m;
            side_b = fm;
            side_a *= 0.5;  // Illinois damping keeps convergence superlinear
        } else {
            a = m;
            side_a = fm;
            side_b *= 0.5;
        }
    }
    return 0.5 * (a + b);
}

} // namespace ode_detail

/** Adaptive Dormand Prince 5(4) driver with dense output.

    RHS signature: void(double t, const double* y, double* dydt).
    Event signature: double(const double* y); integration stops at the first time
    the event level crosses from <= 0 to > 0, located on the dense output.

    With has_event false the integration runs to exactly t_final.
    With has_event true, t_final is a cap: reaching it without a crossing throws
    EventNotFound. A start already moving outward (level 0 and immediately
    positive) terminates at the start point. */
template <bool has_event, class RHS, class EV>
void ode_integrate(RHS&& rhs, const double* y0, int dim, double t0, double t_final,
                   EV&& event, const OdeOptions& opt, OdeSolution& sol) {
    using namespace ode_detail;
    sol.clear(dim);
    if (!(t_final > t0)) {
        sol.push_sample(t0, y0);
        return;
    }

    Buf y{}, ynew{}, k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, yerr{};
    std::copy(y0, y0 + dim, y.begin());
    double t = t0;
    sol.push_sample(t, y.data());

    rhs(t, y.data(), k1.data());
    double g_prev = 0.0;
    if constexpr (has_event) g_prev = event(y.data());

    // starting step size, Hairer's heuristic
    double h;
    if (opt.initial_step > 0.0) {
        h = opt.initial_step;
    } else {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < dim; ++i) {
            double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            dnf += (k1[i] / sc) * (k1[i] / sc);
            dny += (y[i] / sc) * (y[i] / sc);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, t_final - t0);
        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * k1[i];
        rhs(t + h, ytmp.data(), k2.data());
        double der2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            double d = (k2[i] - k1[i]) / sc;
            der2 += d * d;
        }
        der2 = std::sqrt(der2) / h;
        double der12 = std::max(der2, std::sqrt(dnf));
        double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3)
                                   : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, t_final - t0});
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

    const double expo1 = 0.2 - 0.04 * 0.75;
    double facold = 1e-4;
    bool last = false;
    long n_accepted = 0;

    for (long step = 0; step < opt.max_steps; ++step) {
        if (t + 1.0001 * h >= t_final) {
            h = t_final - t;
            last = true;
        }
        if (h <= std::abs(t) * 1e-15 + 1e-300)
            throw StepFailure("step size underflow in adaptive integration");

        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp.data(), k2.data());
        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp.data(), k3.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp.data(), k4.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp.data(), k5.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        rhs(t + h, ytmp.data(), k6.data());
        for (int i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                  a76 * k6[i]);
        rhs(t + h, ynew.data(), k7.data());

        double err = 0.0;
        for (int i = 0; i < dim; ++i) {
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
            double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sc) * (yerr[i] / sc);
        }
        err = std::sqrt(err / dim);

        double fac11 = std::pow(std::max(err, 1e-32), expo1);
        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            ++n_accepted;
            sol.n_steps = n_accepted;

            // dense coefficients for this step
            double rc[5 * kMaxOdeDim];
            for (int i = 0; i < dim; ++i) {
                double ydiff = ynew[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                rc[5 * i + 0] = y[i];
                rc[5 * i + 1] = ydiff;
                rc[5 * i + 2] = bspl;
                rc[5 * i + 3] = ydiff - h * k7[i] - bspl;
                rc[5 * i + 4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
            }
            sol.push_step(t, h, rc);

            if constexpr (has_event) {
                double g_new = event(ynew.data());
                if (g_prev <= 0.0 && g_new > 0.0) {
                    int ks = sol.steps() - 1;
                    Buf yq{};
                    auto G = [&](double th) {
                        sol.eval_step(ks, th, yq.data());
                        return event(yq.data());
                    };
                    double lo = 0.0, glo = g_prev;
                    if (glo >= 0.0) {
                        // start sits on the level set; decide by the immediate motion
                        double gp = G(1e-7);
                        if (gp >= 0.0) {
                            sol.eval_step(ks, 0.0, yq.data());
                            sol.push_sample(t, yq.data());
                            sol.reason = StopReason::event;
                            return;
                        }
                        lo = 1e-7;
                        glo = gp;
                    }
                    double th_star = bracketed_root(G, lo, 1.0, glo, g_new);
                    sol.eval_step(ks, th_star, yq.data());
                    sol.push_sample(t + th_star * h, yq.data());
                    sol.reason = StopReason::event;
                    return;
                }
                g_prev = g_new;
            }

            t += h;
            y = ynew;
            k1 = k7;  // first same as last
            sol.push_sample(t, y.data());

            if (last) {
                if constexpr (has_event)
                    throw EventNotFound("no terminal crossing before the time cap");
                sol.reason = StopReason::time_reached;
                return;
            }

            double fac = fac11 / std::pow(facold, 0.04);
            fac = std::max(0.1, std::min(5.0, fac / 0.9));
            double hnew = h / fac;
            if (opt.max_step > 0.0) hnew = std::min(hnew, opt.max_step);
            h = hnew;
        } else {
            ++sol.n_rejected;
            h = h / std::min(5.0, fac11 / 0.9);
            last = false;
        }
    }
    throw StepFailure("adaptive integration exceeded its step budget");
}

struct NoEvent {
    double operator()(const double*) const { return -1.0; }
};

template <class RHS>
void ode_integrate_time(RHS&& rhs, const double* y0, int dim, double t0, double t1,
                        const OdeOptions& opt, OdeSolution& sol) {
    ode_integrate<false>(std::forward<RHS>(rhs), y0, dim, t0, t1, NoEvent{}, opt, sol);
}

template <class RHS, class EV>
void ode_integrate_event(RHS&& rhs, const double* y0, int dim, double t0, double t_cap,
                         EV&& event, const OdeOptions& opt, OdeSolution& sol) {
    ode_integrate<true>(std::forward<RHS>(rhs), y0, dim, t0, t_cap, std::forward<EV>(event),
                        opt, sol);
}

} // namespace relnewt
