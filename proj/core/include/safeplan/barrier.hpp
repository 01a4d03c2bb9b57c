#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "safeplan/geometry.hpp"
#include "safeplan/gridmap.hpp"

namespace safeplan {

inline constexpr int kNumFeatures = 15;
using FeatureVector = Eigen::Matrix<double, kNumFeatures, 1>;

/// Monomial exponents (i, j) of x1^i * x2^j, ordered by total degree, then by
/// x1 exponent descending. Slot 0 is the constant term.
inline constexpr std::array<std::pair<int, int>, kNumFeatures> kFeatureExponents{{
    {0, 0},
    {1, 0}, {0, 1},
    {2, 0}, {1, 1}, {0, 2},
    {3, 0}, {2, 1}, {1, 2}, {0, 3},
    {4, 0}, {3, 1}, {2, 2}, {1, 3}, {0, 4},
}};

/// Slot of monomial x1^i x2^j (i + j <= 4).
constexpr int feature_slot(int i, int j)
{
    const int d = i + j;
    return d * (d + 1) / 2 + (d - i);
}

struct FeatureGradient {
    FeatureVector d_x1;
    FeatureVector d_x2;
};

struct FeatureHessian {
    FeatureVector d_x1x1;
    FeatureVector d_x1x2;
    FeatureVector d_x2x2;
};

FeatureVector features(double x1, double x2);
FeatureGradient features_gradient(double x1, double x2);
FeatureHessian features_hessian(double x1, double x2);

/// Degree-4 polynomial barrier h(x) = beta . z(x) for one obstacle region.
/// h > 0 is free space.
struct BarrierFunction {
    FeatureVector beta = FeatureVector::Zero();
    int region_id = 0;
    Rect window;  ///< training window in world coordinates
};

double eval_h(const BarrierFunction& bf, double x1, double x2);
double eval_h(const FeatureVector& beta, double x1, double x2);

struct CostGradient {
    double cost = 0.0;
    FeatureVector gradient = FeatureVector::Zero();
};

/// Binary cross-entropy sum(ln(1 + e^t) - y t), t = beta . z(p), and its
/// gradient sum((sigmoid(t) - y) z).
CostGradient logistic_cost(const FeatureVector& beta, std::span<const LabeledSample> samples);

/// Same loss over precomputed feature rows.
CostGradient logistic_cost(const FeatureVector& beta,
                           const Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures>& z,
                           const Eigen::VectorXd& y);

double sigmoid(double t);

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BfgsOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double armijo_c = 1e-4;
    double shrink = 0.5;
};

struct BfgsResult {
    FeatureVector x = FeatureVector::Zero();
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> value_trace;  ///< objective after each accepted step, starting at x0
};

using Objective = std::function<double(const FeatureVector& x, FeatureVector& gradient)>;

/// Quasi-Newton minimization with inverse-Hessian BFGS updates and Armijo
/// backtracking.
BfgsResult minimize_bfgs(const Objective& objective, const FeatureVector& x0,
                         const BfgsOptions& options = {});

struct FitReport {
    double final_cost = 0.0;
    int iterations = 0;
    bool converged = false;
    double train_accuracy = 0.0;
    std::size_t samples_used = 0;
    std::vector<double> cost_trace;
};

struct FitResult {
    BarrierFunction barrier;
    FitReport report;
};

/// Expanded window of a region: bounding box grown by `margin` on each side.
Rect fit_window(const Region& region, double margin);

/// Logistic-regression fit of one region's barrier. Only samples inside the
/// region's bounding box expanded by `window_margin` are used. Coordinates are
/// normalized to [-1, 1]^2 inside the window for the optimization; the returned
/// beta is in world coordinates, signed so that free samples lie on h > 0.
/// Throws FitError when the window holds fewer than 16 samples or one label.
FitResult fit(std::span<const LabeledSample> samples, const Region& region, double window_margin,
              const BfgsOptions& options = {});

/// Re-expresses a polynomial in normalized coordinates u = (x1 - c1) / s1,
/// w = (x2 - c2) / s2 as a polynomial in world coordinates.
FeatureVector denormalize_beta(const FeatureVector& beta_normalized, Point2 center, Point2 scale);

struct BarrierFitOptions {
    double spacing = 0.05;
    double ds = 0.2;
    double min_window_margin = 1.0;
    /// Refit with heavier weights on occupied samples that land on the free
    /// side, then shift the constant term, until every cell center of the
    /// region has h < 0.
    bool conservative = true;
    int reweight_rounds = 24;
    double reweight_factor = 1.5;
    BfgsOptions bfgs;

    double window_margin() const;
};

/// Lattice samples over the whole map where only the region's own cells are
/// labeled occupied; other regions are treated as free for this fit.
std::vector<LabeledSample> region_samples(const OccupancyGrid& inflated, const Region& region,
                                          double spacing);

/// Full per-region pipeline over an already-inflated grid.
FitResult fit_region(const OccupancyGrid& inflated, const Region& region,
                     const BarrierFitOptions& options);

/// Fraction of samples in `window` whose sign(h) agrees with the label
/// (h > 0 <=> label 1).
double classification_accuracy(const BarrierFunction& bf, std::span<const LabeledSample> samples,
                               const Rect& window);

// Barrier set file: one `region <id>; window x0 y0 x1 y1; beta b0 ... b14` per line.
void write_barrier_set(std::ostream& out, std::span<const BarrierFunction> barriers);
std::vector<BarrierFunction> read_barrier_set(std::istream& in);

}  // namespace safeplan
