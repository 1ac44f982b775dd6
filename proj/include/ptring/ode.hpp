#ifndef PTRING_ODE_HPP
#define PTRING_ODE_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

// Dormand-Prince 5(4) embedded Runge-Kutta stepper with FSAL reuse, templated
// over any Eigen dense state (complex vectors for the semiclassical fields,
// complex matrices for density operators).

namespace ptring::ode
{

class StepSizeUnderflow : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

template <class State, class Rhs>
class DormandPrince45
{
public:
    DormandPrince45(Rhs rhs, double rel_tol, double abs_tol)
        : rhs_(std::move(rhs)), rel_tol_(rel_tol), abs_tol_(abs_tol)
    {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("DormandPrince45: tolerances must be positive");
    }

    // Advance (t, y) by one accepted step no longer than h_max. `h` carries the
    // proposed step in and the next proposal out. Returns the step taken.
    double step(double &t, State &y, double &h, double h_max)
    {
        if (!have_k1_) {
            rhs_(t, y, k1_);
            have_k1_ = true;
        }
        h = std::min(h, h_max);
        for (;;) {
            if (!(h > min_step(t)))
                throw StepSizeUnderflow("step size underflow");
            attempt(t, y, h);
            const double err = error_norm(y);
            if (err <= 1.0) {
                const double taken = h;
                t += h;
                y = y_new_;
                std::swap(k1_, k7_);
                ++accepted_;
                const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                h = std::min(h * factor, h_max_cap_);
                return taken;
            }
            ++rejected_;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }

    // Invalidate the cached first stage, e.g. after modifying y externally.
    void reset() { have_k1_ = false; }
    void set_step_cap(double cap) { h_max_cap_ = cap; }
    std::size_t accepted() const { return accepted_; }
    std::size_t rejected() const { return rejected_; }

private:
    static double min_step(double t) { return 1e-13 * std::max(1.0, std::abs(t)); }

    void attempt(double t, const State &y, double h)
    {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                         a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                         a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                         b6 = 11.0 / 84.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                         e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

        tmp_ = y + h * a21 * k1_;
        rhs_(t + h / 5.0, tmp_, k2_);
        tmp_ = y + h * (a31 * k1_ + a32 * k2_);
        rhs_(t + 3.0 * h / 10.0, tmp_, k3_);
        tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        rhs_(t + 4.0 * h / 5.0, tmp_, k4_);
        tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        rhs_(t + 8.0 * h / 9.0, tmp_, k5_);
        tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        rhs_(t + h, tmp_, k6_);
        y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
        rhs_(t + h, y_new_, k7_);
        err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    }

    double error_norm(const State &y) const
    {
        const auto scale = (abs_tol_ + rel_tol_ * y.cwiseAbs().cwiseMax(y_new_.cwiseAbs()).array());
        const double err = (err_.cwiseAbs().array() / scale).maxCoeff();
        return std::isfinite(err) ? err : 1e10;
    }

    Rhs rhs_;
    double rel_tol_;
    double abs_tol_;
    double h_max_cap_ = 1e300;
    bool have_k1_ = false;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_, err_;
};

} // namespace ptring::ode

#endif // PTRING_ODE_HPP
