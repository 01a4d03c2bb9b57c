#include "safeplan/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace safeplan {

namespace {

// powers[k] = x^k, k = 0..4
std::array<double, 5> powers(double x)
{
    std::array<double, 5> p{1.0, x, 0.0, 0.0, 0.0};
    p[2] = x * x;
    p[3] = p[2] * x;
    p[4] = p[3] * x;
    return p;
}

// d^order/dx^order of x^k evaluated through the power table
double derivative_term(const std::array<double, 5>& p, int k, int order)
{
    if (order > k)
        return 0.0;
    double coeff = 1.0;
    for (int m = 0; m < order; ++m)
        coeff *= static_cast<double>(k - m);
    return coeff * p[static_cast<std::size_t>(k - order)];
}

}  // namespace

FeatureVector features(double x1, double x2)
{
    const auto p = powers(x1);
    const auto q = powers(x2);
    FeatureVector z;
    for (int k = 0; k < kNumFeatures; ++k) {
        const auto [i, j] = kFeatureExponents[static_cast<std::size_t>(k)];
        z[k] = p[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)];
    }
    return z;
}

FeatureGradient features_gradient(double x1, double x2)
{
    const auto p = powers(x1);
    const auto q = powers(x2);
    FeatureGradient g;
    for (int k = 0; k < kNumFeatures; ++k) {
        const auto [i, j] = kFeatureExponents[static_cast<std::size_t>(k)];
        g.d_x1[k] = derivative_term(p, i, 1) * q[static_cast<std::size_t>(j)];
        g.d_x2[k] = p[static_cast<std::size_t>(i)] * derivative_term(q, j, 1);
    }
    return g;
}

FeatureHessian features_hessian(double x1, double x2)
{
    const auto p = powers(x1);
    const auto q = powers(x2);
    FeatureHessian h;
    for (int k = 0; k < kNumFeatures; ++k) {
        const auto [i, j] = kFeatureExponents[static_cast<std::size_t>(k)];
        h.d_x1x1[k] = derivative_term(p, i, 2) * q[static_cast<std::size_t>(j)];
        h.d_x1x2[k] = derivative_term(p, i, 1) * derivative_term(q, j, 1);
        h.d_x2x2[k] = p[static_cast<std::size_t>(i)] * derivative_term(q, j, 2);
    }
    return h;
}

double eval_h(const FeatureVector& beta, double x1, double x2)
{
    return beta.dot(features(x1, x2));
}

double eval_h(const BarrierFunction& bf, double x1, double x2)
{
    return eval_h(bf.beta, x1, x2);
}

double sigmoid(double t)
{
    if (t >= 0.0)
        return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

namespace {

// ln(1 + e^t) without overflow
double softplus(double t)
{
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

}  // namespace

CostGradient logistic_cost(const FeatureVector& beta,
                           const Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures>& z,
                           const Eigen::VectorXd& y)
{
    if (z.rows() == 0)
        throw std::invalid_argument("logistic_cost: empty sample list");
    const Eigen::VectorXd t = z * beta;
    CostGradient out;
    Eigen::VectorXd residual(t.size());
    for (Eigen::Index n = 0; n < t.size(); ++n) {
        out.cost += softplus(t[n]) - y[n] * t[n];
        residual[n] = sigmoid(t[n]) - y[n];
    }
    out.gradient = z.transpose() * residual;
    return out;
}

CostGradient logistic_cost(const FeatureVector& beta, std::span<const LabeledSample> samples)
{
    if (samples.empty())
        throw std::invalid_argument("logistic_cost: empty sample list");
    CostGradient out;
    for (const auto& s : samples) {
        const FeatureVector z = features(s.position.x, s.position.y);
        const double t = beta.dot(z);
        const double y = static_cast<double>(s.label);
        out.cost += softplus(t) - y * t;
        out.gradient += (sigmoid(t) - y) * z;
    }
    return out;
}

// ---------------------------------------------------------------------------
// BFGS

BfgsResult minimize_bfgs(const Objective& objective, const FeatureVector& x0,
                         const BfgsOptions& options)
{
    using Matrix = Eigen::Matrix<double, kNumFeatures, kNumFeatures>;
    BfgsResult res;
    res.x = x0;
    FeatureVector g;
    res.value = objective(res.x, g);
    res.value_trace.push_back(res.value);

    Matrix h_inv = Matrix::Identity();
    bool scaled = false;

    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        if (g.norm() < options.gradient_tolerance) {
            res.converged = true;
            break;
        }
        FeatureVector dir = -h_inv * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h_inv.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }

        double step = 1.0;
        FeatureVector x_new, g_new;
        double f_new = 0.0;
        bool accepted = false;
        while (step > 1e-20) {
            x_new = res.x + step * dir;
            f_new = objective(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= res.value + options.armijo_c * step * slope) {
                accepted = true;
                break;
            }
            step *= options.shrink;
        }
        if (!accepted)
            break;

        const FeatureVector s = x_new - res.x;
        const FeatureVector yv = g_new - g;
        const double sy = s.dot(yv);
        res.x = x_new;
        res.value = f_new;
        g = g_new;
        res.value_trace.push_back(res.value);

        if (sy > 1e-14 * s.norm() * yv.norm() && sy > 0.0) {
            if (!scaled) {
                h_inv = Matrix::Identity() * (sy / yv.squaredNorm());
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Matrix left = Matrix::Identity() - rho * s * yv.transpose();
            h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
        }
    }
    if (!res.converged && g.norm() < options.gradient_tolerance)
        res.converged = true;
    return res;
}

// ---------------------------------------------------------------------------
// Fitting

Rect fit_window(const Region& region, double margin)
{
    return region.bounding_box.expanded(margin);
}

FeatureVector denormalize_beta(const FeatureVector& beta_normalized, Point2 center, Point2 scale)
{
    // ((x - c) / s)^i = sum_a C(i, a) x^a (-c)^(i - a) / s^i
    const auto expand = [](double c, double s, int i) {
        std::array<double, 5> coeff{};
        double binom = 1.0;
        for (int a = 0; a <= i; ++a) {
            coeff[static_cast<std::size_t>(a)] =
                binom * std::pow(-c, i - a) / std::pow(s, i);
            binom = binom * (i - a) / (a + 1);
        }
        return coeff;
    };

    FeatureVector world = FeatureVector::Zero();
    for (int k = 0; k < kNumFeatures; ++k) {
        const auto [i, j] = kFeatureExponents[static_cast<std::size_t>(k)];
        const auto cx = expand(center.x, scale.x, i);
        const auto cy = expand(center.y, scale.y, j);
        for (int a = 0; a <= i; ++a)
            for (int b = 0; b <= j; ++b)
                world[feature_slot(a, b)] += beta_normalized[k] *
                                             cx[static_cast<std::size_t>(a)] *
                                             cy[static_cast<std::size_t>(b)];
    }
    return world;
}

double classification_accuracy(const BarrierFunction& bf, std::span<const LabeledSample> samples,
                               const Rect& window)
{
    std::size_t total = 0, correct = 0;
    for (const auto& s : samples) {
        if (!window.contains(s.position))
            continue;
        ++total;
        const double h = eval_h(bf, s.position.x, s.position.y);
        if ((h > 0.0) == (s.label == 1))
            ++correct;
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

// Samples of one window in normalized coordinates.
struct WindowProblem {
    Rect window;
    Point2 center;
    Point2 scale;
    std::vector<LabeledSample> samples;
    Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures> z;
    Eigen::VectorXd y;
};

WindowProblem make_problem(std::span<const LabeledSample> samples, const Region& region,
                           double window_margin)
{
    WindowProblem p;
    p.window = fit_window(region, window_margin);
    p.center = {0.5 * (p.window.min_x + p.window.max_x), 0.5 * (p.window.min_y + p.window.max_y)};
    p.scale = {0.5 * p.window.width(), 0.5 * p.window.height()};
    if (!(p.scale.x > 0.0) || !(p.scale.y > 0.0))
        throw FitError("fit: degenerate window");

    std::size_t free_count = 0;
    for (const auto& s : samples) {
        if (p.window.contains(s.position)) {
            p.samples.push_back(s);
            free_count += s.label == 1 ? 1 : 0;
        }
    }
    if (p.samples.size() < 16)
        throw FitError("fit: region " + std::to_string(region.id) +
                       " has fewer than 16 samples in its window");
    if (free_count == 0 || free_count == p.samples.size())
        throw FitError("fit: region " + std::to_string(region.id) +
                       " window contains a single label, no boundary to fit");

    const auto n = static_cast<Eigen::Index>(p.samples.size());
    p.z.resize(n, kNumFeatures);
    p.y.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& s = p.samples[static_cast<std::size_t>(r)];
        p.z.row(r) = features((s.position.x - p.center.x) / p.scale.x,
                              (s.position.y - p.center.y) / p.scale.y)
                         .transpose();
        p.y[r] = static_cast<double>(s.label);
    }
    return p;
}

// Weighted mean loss; weights == nullptr is the plain cross-entropy. The mean
// has the same minimizer as the sum and keeps the gradient tolerance
// independent of the sample count.
BfgsResult solve_problem(const WindowProblem& p, const Eigen::VectorXd* weights,
                         const FeatureVector& x0, const BfgsOptions& options)
{
    const double inv_n =
        1.0 / (weights ? weights->sum() : static_cast<double>(p.samples.size()));
    const Objective objective = [&](const FeatureVector& beta, FeatureVector& grad) {
        const Eigen::VectorXd t = p.z * beta;
        double cost = 0.0;
        Eigen::VectorXd residual(t.size());
        for (Eigen::Index n = 0; n < t.size(); ++n) {
            const double w = weights ? (*weights)[n] : 1.0;
            cost += w * (softplus(t[n]) - p.y[n] * t[n]);
            residual[n] = w * (sigmoid(t[n]) - p.y[n]);
        }
        grad = (p.z.transpose() * residual) * inv_n;
        return cost * inv_n;
    };
    return minimize_bfgs(objective, x0, options);
}

FitResult finish(const WindowProblem& p, const Region& region, const BfgsResult& opt)
{
    FitResult out;
    out.barrier.region_id = region.id;
    out.barrier.window = p.window;
    out.barrier.beta = denormalize_beta(opt.x, p.center, p.scale);
    double acc = classification_accuracy(out.barrier, p.samples, p.window);
    if (acc < 0.5) {
        out.barrier.beta = -out.barrier.beta;
        acc = 1.0 - acc;
    }
    out.report.iterations = opt.iterations;
    out.report.converged = opt.converged;
    out.report.train_accuracy = acc;
    out.report.samples_used = p.samples.size();
    return out;
}

}  // namespace

FitResult fit(std::span<const LabeledSample> samples, const Region& region, double window_margin,
              const BfgsOptions& options)
{
    const WindowProblem p = make_problem(samples, region, window_margin);
    const BfgsResult opt = solve_problem(p, nullptr, FeatureVector::Zero(), options);
    FitResult out = finish(p, region, opt);
    const double n = static_cast<double>(p.samples.size());
    out.report.final_cost = opt.value * n;
    out.report.cost_trace.reserve(opt.value_trace.size());
    for (double v : opt.value_trace)
        out.report.cost_trace.push_back(v * n);
    return out;
}

double BarrierFitOptions::window_margin() const
{
    return std::max(min_window_margin, 3.0 * ds);
}

std::vector<LabeledSample> region_samples(const OccupancyGrid& inflated, const Region& region,
                                          double spacing)
{
    std::vector<std::uint8_t> mine(inflated.cells().size(), 0);
    for (auto idx : region.cells)
        mine[idx] = 1;
    auto samples = sample_labels(inflated, spacing);
    for (auto& s : samples) {
        const auto c = inflated.world_to_cell(s.position);
        s.label = (c && mine[inflated.index(*c)]) ? 0 : 1;
    }
    return samples;
}

FitResult fit_region(const OccupancyGrid& inflated, const Region& region,
                     const BarrierFitOptions& options)
{
    const auto samples = region_samples(inflated, region, options.spacing);
    FitResult result = fit(samples, region, options.window_margin(), options.bfgs);
    if (!options.conservative)
        return result;

    // Reweighting rounds: occupied samples still on the free side get heavier
    // until every one of them is classified occupied.
    const WindowProblem p = make_problem(samples, region, options.window_margin());
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p.samples.size()));
    FeatureVector x = FeatureVector::Zero();
    {
        // warm start from the unweighted optimum
        const BfgsResult opt = solve_problem(p, nullptr, x, options.bfgs);
        x = opt.x;
    }
    const auto misclassified_occupied = [&](const FeatureVector& beta_norm) {
        const Eigen::VectorXd t = p.z * beta_norm;
        std::vector<Eigen::Index> out;
        for (Eigen::Index n = 0; n < t.size(); ++n)
            if (p.y[n] == 0.0 && !(t[n] < 0.0))
                out.push_back(n);
        return out;
    };
    for (int round = 0; round < options.reweight_rounds; ++round) {
        const auto wrong = misclassified_occupied(x);
        if (wrong.empty())
            break;
        for (auto n : wrong)
            weights[n] *= options.reweight_factor;
        const BfgsResult opt = solve_problem(p, &weights, x, options.bfgs);
        x = opt.x;
        result.report.iterations += opt.iterations;
        result.report.converged = result.report.converged && opt.converged;
    }
    result.barrier.beta = denormalize_beta(x, p.center, p.scale);
    if (classification_accuracy(result.barrier, p.samples, p.window) < 0.5)
        result.barrier.beta = -result.barrier.beta;

    // Residual cells (region cells that are not lattice samples) are handled
    // by shifting the constant term.
    double worst = -std::numeric_limits<double>::infinity();
    for (auto idx : region.cells) {
        const Point2 c = inflated.cell_center(inflated.cell_of(idx));
        worst = std::max(worst, eval_h(result.barrier, c.x, c.y));
    }
    if (worst >= 0.0) {
        double scale = 0.0;
        for (const auto& s : p.samples)
            scale += std::abs(eval_h(result.barrier, s.position.x, s.position.y));
        scale /= static_cast<double>(p.samples.size());
        result.barrier.beta[0] -= worst + 1e-3 * scale;
    }
    result.report.train_accuracy =
        classification_accuracy(result.barrier, p.samples, result.barrier.window);
    return result;
}

}  // namespace safeplan
