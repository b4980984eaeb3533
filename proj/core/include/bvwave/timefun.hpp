#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace bvwave {

// Uniform time grid on [0, T] with `steps` intervals of length tau.
struct TimeGrid {
    double T = 0;
    int steps = 0;
    double tau() const { return T / steps; }
    double node(int m) const { return m == steps ? T : m * tau(); }
    bool operator==(const TimeGrid&) const = default;
};

// Piecewise-constant function on [0,T]: values[i] on (breakpoints[i], breakpoints[i+1]).
// Breakpoints are strictly increasing with breakpoints.front() == 0 and back() == T.
struct StepFunction {
    std::vector<double> breakpoints;
    std::vector<double> values;

    double length() const { return breakpoints.back(); }
    double operator()(double t) const;
    double integral() const;
    double mean() const { return integral() / length(); }
    double total_variation() const; // sum of absolute interior jumps
    void merge_equal(double tol); // drop breakpoints whose jump is within tol
};

StepFunction constant_step(double value, double T);

// Integral of |a - b| over [0,T].
double l1_distance(const StepFunction& a, const StepFunction& b);

// Continuous piecewise-linear function with nodal values on a TimeGrid.
struct PiecewiseLinear {
    TimeGrid grid;
    Eigen::VectorXd values; // steps + 1 entries
    double operator()(double t) const;
};

// C^1-free continuous piecewise-quadratic: on interval m the value at
// t = node(m) + s is a[m] s^2 + b[m] s + c[m].
struct PiecewiseQuadratic {
    TimeGrid grid;
    std::vector<double> a, b, c; // one triple per interval
    double operator()(double t) const;
    PiecewiseLinear derivative() const; // exact when the quadratic is C^1
};

struct MaxAbsResult {
    double t = 0;
    double value = 0; // |p(t)| at the maximizer
};

// Global maximizer of |p| over [0,T]; exact candidate search over interval
// endpoints and interior parabola vertices. Ties resolve to the smallest t.
MaxAbsResult global_max_abs(const PiecewiseQuadratic& p);

// Integrals of u against every nodal hat function of the grid, computed by
// exact breakpoint splitting. Result has steps+1 entries.
Eigen::VectorXd step_hat_integrals(const StepFunction& u, const TimeGrid& grid);

// Same for a smooth integrand, via fixed-order Gauss-Legendre panels per
// grid interval (near machine precision for trigonometric factors).
Eigen::VectorXd smooth_hat_integrals(const std::function<double(double)>& f,
                                     const TimeGrid& grid);

// Integral of u(t) * d(t) with d continuous piecewise linear, exact.
double step_linear_integral(const StepFunction& u, const PiecewiseLinear& d);

// 16-point Gauss-Legendre nodes and weights on [-1, 1].
const std::vector<std::pair<double, double>>& gauss16();

// Composite Gauss-Legendre integral of f over [a, b] with the given panel count.
double gauss_integral(const std::function<double(double)>& f, double a, double b,
                      int panels);

} // namespace bvwave
