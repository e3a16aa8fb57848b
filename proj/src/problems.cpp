#include "pfopt/problems.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pfopt/kernels.hpp"
#include "pfopt/rng.hpp"

namespace pfopt {
namespace {

double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow
double softplus_neg(double z) {
    if (z > 0.0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

void require_dim(const Problem& p, std::size_t n, const char* what) {
    if (n != p.dim) {
        throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(p.dim) +
                                    ", got " + std::to_string(n));
    }
}

struct MlpView {
    std::size_t d_in;
    std::size_t hidden;
    const double* w1;  // hidden x d_in
    const double* b1;
    const double* w2;
    double b2;

    MlpView(const Problem& p, std::span<const double> params)
        : d_in(p.X.cols),
          hidden(p.hidden),
          w1(params.data()),
          b1(params.data() + p.hidden * p.X.cols),
          w2(b1 + p.hidden),
          b2(w2[p.hidden]) {}
};

double mlp_forward(const MlpView& net, std::span<const double> input, std::vector<double>& h) {
    const auto& k = kernels::active();
    double out = net.b2;
    for (std::size_t j = 0; j < net.hidden; ++j) {
        h[j] = std::tanh(k.dot(net.w1 + j * net.d_in, input.data(), net.d_in) + net.b1[j]);
        out += net.w2[j] * h[j];
    }
    return out;
}

// Adds weight * grad(loss_i)(x) to out.
void add_sample_gradient(const Problem& p, std::span<const double> x, std::size_t i, double weight,
                         std::span<double> out, std::vector<double>& scratch) {
    const auto& k = kernels::active();
    const auto xi = p.X.row(i);
    switch (p.kind) {
        case ProblemKind::least_squares: {
            const double resid = k.dot(x.data(), xi.data(), p.dim) - p.y[i];
            k.axpy(weight * resid, xi.data(), out.data(), p.dim);
            break;
        }
        case ProblemKind::logistic: {
            const double margin = p.y[i] * k.dot(x.data(), xi.data(), p.dim);
            k.axpy(-weight * p.y[i] * sigmoid(-margin), xi.data(), out.data(), p.dim);
            break;
        }
        case ProblemKind::tiny_mlp: {
            const MlpView net(p, x);
            scratch.resize(net.hidden);
            const double err = mlp_forward(net, xi, scratch) - p.y[i];
            double* g_w1 = out.data();
            double* g_b1 = g_w1 + net.hidden * net.d_in;
            double* g_w2 = g_b1 + net.hidden;
            for (std::size_t j = 0; j < net.hidden; ++j) {
                const double hj = scratch[j];
                const double dh = weight * err * net.w2[j] * (1.0 - hj * hj);
                k.axpy(dh, xi.data(), g_w1 + j * net.d_in, net.d_in);
                g_b1[j] += dh;
                g_w2[j] += weight * err * hj;
            }
            g_w2[net.hidden] += weight * err;
            break;
        }
        default:
            throw std::logic_error("add_sample_gradient: problem has no samples");
    }
}

double sample_loss(const Problem& p, std::span<const double> x, std::size_t i, std::vector<double>& scratch) {
    const auto& k = kernels::active();
    const auto xi = p.X.row(i);
    switch (p.kind) {
        case ProblemKind::least_squares: {
            const double resid = k.dot(x.data(), xi.data(), p.dim) - p.y[i];
            return 0.5 * resid * resid;
        }
        case ProblemKind::logistic:
            return softplus_neg(p.y[i] * k.dot(x.data(), xi.data(), p.dim));
        case ProblemKind::tiny_mlp: {
            const MlpView net(p, x);
            scratch.resize(net.hidden);
            const double err = mlp_forward(net, xi, scratch) - p.y[i];
            return 0.5 * err * err;
        }
        default:
            throw std::logic_error("sample_loss: problem has no samples");
    }
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
    return out;
}

// Regularized Hessian for the quadratic-type kinds.
Eigen::MatrixXd quadratic_hessian(const Problem& p) {
    const auto d = static_cast<Eigen::Index>(p.dim);
    Eigen::MatrixXd H;
    if (p.kind == ProblemKind::quadratic) {
        H = to_eigen(p.A);
    } else if (p.kind == ProblemKind::least_squares) {
        const Eigen::MatrixXd X = to_eigen(p.X);
        H = (X.transpose() * X) / static_cast<double>(p.X.rows);
    } else {
        throw std::invalid_argument("quadratic_hessian: unsupported problem kind");
    }
    H += p.l2_reg * Eigen::MatrixXd::Identity(d, d);
    return H;
}

}  // namespace

std::string_view to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::quadratic: return "quadratic";
        case ProblemKind::least_squares: return "least_squares";
        case ProblemKind::logistic: return "logistic";
        case ProblemKind::abs_sum: return "abs_sum";
        case ProblemKind::tiny_mlp: return "tiny_mlp";
    }
    return "?";
}

ProblemKind parse_problem_kind(std::string_view s) {
    for (auto k : {ProblemKind::quadratic, ProblemKind::least_squares, ProblemKind::logistic, ProblemKind::abs_sum,
                   ProblemKind::tiny_mlp}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown problem kind '" + std::string(s) + "'");
}

std::string_view to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::none: return "none";
        case NoiseKind::additive_gaussian: return "additive_gaussian";
        case NoiseKind::minibatch: return "minibatch";
    }
    return "?";
}

NoiseKind parse_noise_kind(std::string_view s) {
    for (auto k : {NoiseKind::none, NoiseKind::additive_gaussian, NoiseKind::minibatch}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown noise kind '" + std::string(s) + "'");
}

std::size_t tiny_mlp_dim(std::size_t d_in, std::size_t hidden) { return hidden * (d_in + 2) + 1; }

void validate(const Problem& p) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid problem: " + msg); };
    if (p.dim == 0) fail("dimension must be positive");
    if (!(p.l2_reg >= 0.0) || !std::isfinite(p.l2_reg)) fail("l2_reg must be finite and nonnegative");
    switch (p.kind) {
        case ProblemKind::quadratic:
            if (p.A.rows != p.dim || p.A.cols != p.dim) fail("A must be dim x dim");
            if (p.b.size() != p.dim) fail("b must have length dim");
            for (std::size_t i = 0; i < p.dim; ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (p.A(i, j) != p.A(j, i)) fail("A must be symmetric");
            break;
        case ProblemKind::least_squares:
        case ProblemKind::logistic:
            if (p.X.cols != p.dim) fail("X must have dim columns");
            if (p.X.rows == 0 || p.y.size() != p.X.rows) fail("y must have one entry per row of X");
            if (p.kind == ProblemKind::logistic) {
                for (double label : p.y)
                    if (label != 1.0 && label != -1.0) fail("logistic labels must be -1 or +1");
            }
            break;
        case ProblemKind::abs_sum:
            break;
        case ProblemKind::tiny_mlp:
            if (p.hidden == 0) fail("hidden width must be positive");
            if (p.X.rows == 0 || p.y.size() != p.X.rows) fail("y must have one entry per row of X");
            if (p.dim != tiny_mlp_dim(p.X.cols, p.hidden)) fail("dim must equal hidden*(d_in+2)+1");
            break;
    }
    if (!all_finite(p.A.data) || !all_finite(p.b) || !all_finite(p.X.data) || !all_finite(p.y))
        fail("data must be finite");
}

double loss(const Problem& p, std::span<const double> x) {
    require_dim(p, x.size(), "loss");
    const auto& k = kernels::active();
    double f = 0.0;
    switch (p.kind) {
        case ProblemKind::quadratic: {
            std::vector<double> ax(p.dim);
            for (std::size_t i = 0; i < p.dim; ++i) ax[i] = k.dot(p.A.row(i).data(), x.data(), p.dim);
            f = 0.5 * k.dot(ax.data(), x.data(), p.dim) - k.dot(p.b.data(), x.data(), p.dim);
            break;
        }
        case ProblemKind::abs_sum:
            f = k.sum_abs(x.data(), p.dim);
            break;
        default: {
            std::vector<double> scratch;
            for (std::size_t i = 0; i < p.X.rows; ++i) f += sample_loss(p, x, i, scratch);
            f /= static_cast<double>(p.X.rows);
            break;
        }
    }
    if (p.l2_reg > 0.0) f += 0.5 * p.l2_reg * k.sum_squares(x.data(), p.dim);
    return f;
}

void full_gradient_into(const Problem& p, std::span<const double> x, std::span<double> out) {
    require_dim(p, x.size(), "full_gradient");
    require_dim(p, out.size(), "full_gradient output");
    const auto& k = kernels::active();
    std::fill(out.begin(), out.end(), 0.0);
    switch (p.kind) {
        case ProblemKind::quadratic:
            for (std::size_t i = 0; i < p.dim; ++i) out[i] = k.dot(p.A.row(i).data(), x.data(), p.dim) - p.b[i];
            break;
        case ProblemKind::abs_sum:
            for (std::size_t i = 0; i < p.dim; ++i) out[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
            break;
        default: {
            std::vector<double> scratch;
            const double w = 1.0 / static_cast<double>(p.X.rows);
            for (std::size_t i = 0; i < p.X.rows; ++i) add_sample_gradient(p, x, i, w, out, scratch);
            break;
        }
    }
    if (p.l2_reg > 0.0) k.axpy(p.l2_reg, x.data(), out.data(), p.dim);
}

ParamVector full_gradient(const Problem& p, std::span<const double> x) {
    ParamVector g(p.dim);
    full_gradient_into(p, x, g.span());
    return g;
}

void stochastic_gradient_into(const Problem& p, const NoiseModel& noise, std::span<const double> x,
                              std::uint64_t step, std::span<double> out) {
    switch (noise.kind) {
        case NoiseKind::none:
            full_gradient_into(p, x, out);
            return;
        case NoiseKind::additive_gaussian: {
            full_gradient_into(p, x, out);
            auto gen = stream_engine(noise.seed, step);
            std::normal_distribution<double> z(0.0, 1.0);
            for (double& gi : out) gi += noise.sigma * z(gen);
            return;
        }
        case NoiseKind::minibatch: {
            if (!p.has_samples())
                throw std::invalid_argument("minibatch noise requires a data-backed problem, got " +
                                            std::string(to_string(p.kind)));
            if (noise.batch_size == 0 || noise.batch_size > p.X.rows)
                throw std::invalid_argument("minibatch batch_size must be in [1, m]");
            require_dim(p, x.size(), "stochastic_gradient");
            require_dim(p, out.size(), "stochastic_gradient output");
            std::fill(out.begin(), out.end(), 0.0);
            auto gen = stream_engine(noise.seed, step);
            std::uniform_int_distribution<std::size_t> pick(0, p.X.rows - 1);
            std::vector<double> scratch;
            const double w = 1.0 / static_cast<double>(noise.batch_size);
            for (std::size_t j = 0; j < noise.batch_size; ++j) add_sample_gradient(p, x, pick(gen), w, out, scratch);
            if (p.l2_reg > 0.0) kernels::active().axpy(p.l2_reg, x.data(), out.data(), p.dim);
            return;
        }
    }
}

ParamVector stochastic_gradient(const Problem& p, const NoiseModel& noise, std::span<const double> x,
                                std::uint64_t step) {
    ParamVector g(p.dim);
    stochastic_gradient_into(p, noise, x, step, g.span());
    return g;
}

Minimizer solve_minimizer(const Problem& p) {
    validate(p);
    const auto d = static_cast<Eigen::Index>(p.dim);
    Minimizer out;

    switch (p.kind) {
        case ProblemKind::abs_sum:
            out.x_star = ParamVector(p.dim, 0.0);
            out.method = MinimizerMethod::closed_form;
            out.tolerance = 0.0;
            break;

        case ProblemKind::quadratic:
        case ProblemKind::least_squares: {
            const Eigen::MatrixXd H = quadratic_hessian(p);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
            const double lo = eig.eigenvalues().minCoeff();
            const double hi = eig.eigenvalues().maxCoeff();
            if (lo <= 1e-12 * std::max(1.0, hi))
                throw std::domain_error("solve_minimizer: singular system; configure l2_reg > 0");
            Eigen::VectorXd rhs(d);
            if (p.kind == ProblemKind::quadratic) {
                for (Eigen::Index i = 0; i < d; ++i) rhs(i) = p.b[static_cast<std::size_t>(i)];
            } else {
                const Eigen::MatrixXd X = to_eigen(p.X);
                const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(p.y.data(), static_cast<Eigen::Index>(p.y.size()));
                rhs = X.transpose() * y / static_cast<double>(p.X.rows);
            }
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
            Eigen::VectorXd xs = ldlt.solve(rhs);
            // one step of iterative refinement against the exact residual
            const Eigen::VectorXd resid = rhs - H * xs;
            xs += ldlt.solve(resid);
            out.x_star = ParamVector(std::vector<double>(xs.data(), xs.data() + d));
            out.method = MinimizerMethod::closed_form;
            out.tolerance = 1e-8;
            break;
        }

        case ProblemKind::logistic: {
            constexpr double kTol = 1e-10;
            constexpr std::size_t kMaxIter = 500;
            std::vector<double> w(p.dim, 0.0);
            std::vector<double> trial(p.dim);
            const Eigen::MatrixXd X = to_eigen(p.X);
            const auto m = static_cast<double>(p.X.rows);
            bool converged = false;
            std::size_t iter = 0;
            for (; iter < kMaxIter; ++iter) {
                const ParamVector g = full_gradient(p, w);
                if (l2_norm(g.span()) <= kTol) {
                    converged = true;
                    break;
                }
                Eigen::MatrixXd H = p.l2_reg * Eigen::MatrixXd::Identity(d, d);
                for (std::size_t i = 0; i < p.X.rows; ++i) {
                    const double z = p.y[i] * dot(w, p.X.row(i));
                    const double s = sigmoid(z);
                    const Eigen::VectorXd xi = X.row(static_cast<Eigen::Index>(i)).transpose();
                    H.selfadjointView<Eigen::Lower>().rankUpdate(xi, s * (1.0 - s) / m);
                }
                H = H.selfadjointView<Eigen::Lower>();
                const Eigen::VectorXd gv = Eigen::Map<const Eigen::VectorXd>(g.data(), d);
                const Eigen::VectorXd dir = H.ldlt().solve(-gv);
                const double decrement = -gv.dot(dir);
                if (!std::isfinite(decrement)) break;

                // Backtracking; near the optimum the decrease is below double
                // resolution of f, so the full Newton step is taken outright.
                double step = 1.0;
                if (decrement > 1e-14) {
                    const double f0 = loss(p, w);
                    while (step > 1e-12) {
                        for (std::size_t j = 0; j < p.dim; ++j) trial[j] = w[j] + step * dir(static_cast<Eigen::Index>(j));
                        if (loss(p, trial) <= f0 - 1e-4 * step * decrement) break;
                        step *= 0.5;
                    }
                }
                for (std::size_t j = 0; j < p.dim; ++j) w[j] += step * dir(static_cast<Eigen::Index>(j));
            }
            if (!converged)
                throw std::runtime_error("solve_minimizer: Newton did not reach |grad| <= 1e-10 within 500 "
                                         "iterations; data may be separable without l2_reg");
            out.x_star = ParamVector(std::move(w));
            out.method = MinimizerMethod::newton;
            out.tolerance = kTol;
            out.iterations = iter;
            break;
        }

        case ProblemKind::tiny_mlp:
            throw std::invalid_argument("solve_minimizer: tiny_mlp has no computable minimizer");
    }

    out.f_star = loss(p, out.x_star.span());
    out.grad_norm = l2_norm(full_gradient(p, out.x_star.span()).span());
    if (p.kind != ProblemKind::abs_sum && out.grad_norm > out.tolerance)
        throw std::runtime_error("solve_minimizer: residual gradient " + std::to_string(out.grad_norm) +
                                 " exceeds tolerance");
    return out;
}

Problem make_synthetic(ProblemKind kind, std::size_t d, std::size_t m, std::uint64_t seed,
                       const SyntheticOptions& opts) {
    if (d == 0 || m == 0) throw std::invalid_argument("make_synthetic: d and m must be >= 1");
    std::mt19937_64 gen(splitmix64(seed));
    std::normal_distribution<double> normal(0.0, 1.0);

    Problem p;
    p.kind = kind;
    p.l2_reg = opts.l2_reg;
    p.dim = d;

    auto gaussian_matrix = [&](std::size_t rows, std::size_t cols) {
        Matrix M(rows, cols);
        for (double& e : M.data) e = normal(gen);
        return M;
    };

    switch (kind) {
        case ProblemKind::quadratic: {
            const auto n = static_cast<Eigen::Index>(d);
            Eigen::MatrixXd A;
            if (opts.condition > 0.0) {
                const Matrix G = gaussian_matrix(d, d);
                const Eigen::HouseholderQR<Eigen::MatrixXd> qr(to_eigen(G));
                const Eigen::MatrixXd Q = qr.householderQ();
                Eigen::VectorXd lambda(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double frac = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
                    lambda(i) = opts.mu * std::pow(opts.condition, frac);
                }
                A = Q * lambda.asDiagonal() * Q.transpose();
            } else {
                const Eigen::MatrixXd M = to_eigen(gaussian_matrix(m, d));
                A = M.transpose() * M / static_cast<double>(m);
                A += opts.mu * Eigen::MatrixXd::Identity(n, n);
            }
            p.A = Matrix(d, d);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    const auto jj = static_cast<Eigen::Index>(j);
                    const double sym = 0.5 * (A(ii, jj) + A(jj, ii));
                    p.A(i, j) = sym;
                    p.A(j, i) = sym;
                }
            }
            p.b.resize(d);
            for (double& e : p.b) e = normal(gen);
            break;
        }
        case ProblemKind::least_squares: {
            p.X = gaussian_matrix(m, d);
            std::vector<double> w_true(d);
            for (double& e : w_true) e = normal(gen);
            p.y.resize(m);
            for (std::size_t i = 0; i < m; ++i) p.y[i] = dot(p.X.row(i), w_true) + opts.label_noise * normal(gen);
            break;
        }
        case ProblemKind::logistic: {
            std::vector<double> dir(d);
            for (double& e : dir) e = normal(gen);
            const double norm = l2_norm(dir);
            for (double& e : dir) e /= norm;
            p.X = Matrix(m, d);
            p.y.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double label = (i % 2 == 0) ? 1.0 : -1.0;
                p.y[i] = label;
                for (std::size_t j = 0; j < d; ++j) p.X(i, j) = label * 0.5 * opts.margin * dir[j] + normal(gen);
            }
            break;
        }
        case ProblemKind::abs_sum:
            break;
        case ProblemKind::tiny_mlp: {
            p.hidden = opts.hidden;
            p.X = gaussian_matrix(m, d);
            std::vector<double> teacher(d);
            for (double& e : teacher) e = normal(gen) / std::sqrt(static_cast<double>(d));
            p.y.resize(m);
            for (std::size_t i = 0; i < m; ++i)
                p.y[i] = std::sin(2.0 * dot(p.X.row(i), teacher)) + opts.label_noise * normal(gen);
            p.dim = tiny_mlp_dim(d, opts.hidden);
            break;
        }
    }
    validate(p);
    return p;
}

double condition_number(const Problem& p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(quadratic_hessian(p), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
}

double min_eigenvalue(const Problem& p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(quadratic_hessian(p), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

}  // namespace pfopt
