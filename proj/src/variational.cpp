#include "regchrom/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "regchrom/errors.hpp"

namespace regchrom {

namespace {

// 0 log 0 = 0.
inline double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

void check_birkhoff(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 2) throw InputError("matrix must be square with k >= 2");
    if (m.minCoeff() < 0) throw DomainError("matrix has a negative entry");
    if (stochastic_defect(m) > 1e-9) throw InputError("matrix is not doubly stochastic");
}

double phi_unchecked(const Eigen::MatrixXd& m, double d) {
    const double k = static_cast<double>(m.rows());
    double entropy = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i) entropy += xlogx(m.data()[i]);
    return -entropy / k + 0.5 * d * std::log(1 - 2 / k + m.squaredNorm() / (k * k));
}

Eigen::MatrixXd phi_gradient(const Eigen::MatrixXd& m, double d) {
    const double k = static_cast<double>(m.rows());
    const double q = 1 - 2 / k + m.squaredNorm() / (k * k);
    Eigen::MatrixXd g(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double x = std::max(m.data()[i], 1e-300);
        g.data()[i] = -(std::log(x) + 1) / k + d * x / (k * k * q);
    }
    return g;
}

// Projection onto {X : X 1 = 1, X^T 1 = 1}.
Eigen::MatrixXd project_margins(const Eigen::MatrixXd& x) {
    const double k = static_cast<double>(x.rows());
    const Eigen::VectorXd r = x.rowwise().sum().array() - 1.0;
    const Eigen::RowVectorXd c = x.colwise().sum().array() - 1.0;
    const double s = x.sum() - k;
    Eigen::MatrixXd out = x;
    out.colwise() -= r / k;
    out.rowwise() -= c / k;
    out.array() += s / (k * k);
    return out;
}

bool lexicographically_less(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
    return false;
}

struct RestartResult {
    Eigen::MatrixXd m;
    RestartTrace trace;
};

RestartResult ascend(Eigen::MatrixXd m, double d, const PhiOptions& options) {
    RestartResult out;
    m = project_birkhoff(m);
    double value = phi_unchecked(m, d);
    for (int it = 0; it < options.max_iterations; ++it) {
        const Eigen::MatrixXd g = phi_gradient(m, d);
        double step = 1.0;
        Eigen::MatrixXd candidate;
        double candidate_value = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        while (step > 1e-30) {
            candidate = project_birkhoff(m + step * g);
            candidate_value = phi_unchecked(candidate, d);
            // Allow round-off sized decreases so the final contraction steps are not rejected.
            if (candidate_value >= value - 4 * std::numeric_limits<double>::epsilon() * std::fabs(value)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        out.trace.iterations = it + 1;
        if (!accepted) {
            out.trace.converged = true;  // no ascent direction left at working precision
            break;
        }
        const double moved = (candidate - m).lpNorm<Eigen::Infinity>();
        m = std::move(candidate);
        value = candidate_value;
        if (moved < options.tol) {
            out.trace.converged = true;
            break;
        }
    }
    out.trace.phi = value;
    out.m = std::move(m);
    return out;
}

}  // namespace

double stochastic_defect(const Eigen::MatrixXd& m) {
    const double rows = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double cols = (m.colwise().sum().array() - 1.0).abs().maxCoeff();
    return std::max(rows, cols);
}

double phi(const Eigen::MatrixXd& m, double d) {
    check_birkhoff(m);
    return phi_unchecked(m, d);
}

double phi_center(int k, double d) {
    return std::log(static_cast<double>(k)) + d * std::log1p(-1.0 / k);
}

double colourability_threshold(int k) {
    return 2.0 * (k - 1) * std::log(static_cast<double>(k - 1));
}

double an_bound_gap(const Eigen::MatrixXd& m, double d) {
    check_birkhoff(m);
    const auto k = static_cast<int>(m.rows());
    const double threshold = colourability_threshold(k);
    if (!(d < threshold))
        throw DomainError("the bound needs d < 2(k-1) ln(k-1) = " + std::to_string(threshold));
    const double slope = (threshold - d) / (4.0 * (k - 1) * (k - 1));
    return phi_center(k, d) - phi_unchecked(m, d) - slope * (m.squaredNorm() - 1);
}

Eigen::MatrixXd random_doubly_stochastic(int k, Philox& rng) {
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = -std::log1p(-rng.uniform01());
    for (int sweep = 0; sweep < 200; ++sweep) {
        m.array().colwise() /= m.rowwise().sum().array();
        m.array().rowwise() /= m.colwise().sum().array();
        if (stochastic_defect(m) < 1e-12) break;
    }
    return m;
}

Eigen::MatrixXd project_birkhoff(const Eigen::MatrixXd& x, int max_sweeps, double tol) {
    Eigen::MatrixXd current = x;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const Eigen::MatrixXd y = project_margins(current + p);
        p = current + p - y;
        const Eigen::MatrixXd next = (y + q).cwiseMax(0.0);
        q = y + q - next;
        const double change = (next - current).lpNorm<Eigen::Infinity>();
        current = next;
        if (change <= tol && stochastic_defect(current) <= 1e-14) break;
    }
    return current;
}

PhiOptimum maximize_phi(int d, int k, const PhiOptions& options) {
    if (k < 2) throw InputError("maximize_phi needs k >= 2");
    if (options.restarts < 1) throw InputError("need at least one restart");
    std::vector<RestartResult> results(static_cast<std::size_t>(options.restarts));
    auto run = [&](int r) {
        Eigen::MatrixXd start;
        if (r == 0 && options.start) {
            start = *options.start;
        } else {
            Philox rng(options.seed, static_cast<std::uint64_t>(r));
            start = random_doubly_stochastic(k, rng);
        }
        results[static_cast<std::size_t>(r)] = ascend(start, d, options);
    };
    const int workers = std::max(1, std::min(options.workers, options.restarts));
    if (workers == 1) {
        for (int r = 0; r < options.restarts; ++r) run(r);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int r = w; r < options.restarts; r += workers) run(r);
            });
        for (auto& t : pool) t.join();
    }

    PhiOptimum out;
    out.phi_center = phi_center(k, d);
    out.below_threshold = d < colourability_threshold(k);
    out.converged = true;
    const RestartResult* best = nullptr;
    for (const auto& r : results) {
        out.trace.push_back(r.trace);
        out.converged = out.converged && r.trace.converged;
        if (!best || r.trace.phi > best->trace.phi ||
            (r.trace.phi == best->trace.phi && lexicographically_less(r.m, best->m)))
            best = &r;
    }
    out.m = best->m;
    out.phi = best->trace.phi;
    out.distance_to_center = (out.m.array() - 1.0 / k).abs().maxCoeff();
    out.beats_center = out.phi > out.phi_center + 1e-9;
    return out;
}

std::vector<std::array<int, 4>> flow_pairs(int k) {
    std::vector<std::array<int, 4>> out;
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            for (int r = p + 1; r < k; ++r)
                for (int s = 0; s < k; ++s)
                    if (s != q) out.push_back({p, q, r, s});
    return out;
}

FlowViolation flow_violation(const Eigen::MatrixXd& m, double d, const FlowTable& l) {
    const auto k = static_cast<int>(m.rows());
    const auto pairs = flow_pairs(k);
    if (l.k != k || l.values.size() != pairs.size()) throw InputError("flow table does not match the matrix size");
    FlowViolation worst;
    Eigen::MatrixXd marginal = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        const auto& [p, q, r, s] = pairs[e];
        const double value = l.values[e];
        if (-value > worst.amount) {
            worst.amount = -value;
            worst.constraint = "l(" + std::to_string(p + 1) + std::to_string(q + 1) + std::to_string(r + 1) +
                               std::to_string(s + 1) + ") >= 0";
        }
        marginal(p, q) += value;
        marginal(r, s) += value;
    }
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) {
            const double gap = std::fabs(marginal(p, q) - d * m(p, q));
            if (gap > worst.amount) {
                worst.amount = gap;
                worst.constraint = "marginal (" + std::to_string(p + 1) + "," + std::to_string(q + 1) + ") = d m";
            }
        }
    return worst;
}

FlowTable feasible_flow(const Eigen::MatrixXd& m, double d) {
    check_birkhoff(m);
    const auto k = static_cast<int>(m.rows());
    const auto pairs = flow_pairs(k);
    Eigen::MatrixXd x = (m.array() > 0).cast<double>();
    FlowTable l{k, std::vector<double>(pairs.size(), 0.0)};
    for (int sweep = 0; sweep < 100000; ++sweep) {
        Eigen::MatrixXd marginal = Eigen::MatrixXd::Zero(k, k);
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            const auto& [p, q, r, s] = pairs[e];
            l.values[e] = x(p, q) * x(r, s) * m(p, q) * m(r, s);
            marginal(p, q) += l.values[e];
            marginal(r, s) += l.values[e];
        }
        double worst = 0;
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) {
                if (m(p, q) <= 0) continue;
                if (marginal(p, q) <= 0) throw DomainError("label has no compatible partner; no feasible flow");
                worst = std::max(worst, std::fabs(marginal(p, q) - d * m(p, q)));
                x(p, q) *= std::sqrt(d * m(p, q) / marginal(p, q));
            }
        if (worst <= 1e-13 * std::max(1.0, d)) return l;
    }
    throw DomainError("symmetric scaling did not reach a feasible flow");
}

FlowTable psi_maximizer(const Eigen::MatrixXd& m, double d) {
    const auto k = static_cast<int>(m.rows());
    const auto pairs = flow_pairs(k);
    double total = 0;  // ordered sum over p != r, q != s
    for (const auto& [p, q, r, s] : pairs) total += 2 * m(p, q) * m(r, s);
    FlowTable l{k, {}};
    l.values.reserve(pairs.size());
    for (const auto& [p, q, r, s] : pairs) l.values.push_back(d * k * m(p, q) * m(r, s) / total);
    return l;
}

double log_psi_hat(const Eigen::MatrixXd& m, const FlowTable& l) {
    const auto pairs = flow_pairs(static_cast<int>(m.rows()));
    double sum = 0;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        const auto& [p, q, r, s] = pairs[e];
        const double v = l.values[e];
        if (v <= 0) continue;
        const double w = m(p, q) * m(r, s);
        if (w <= 0) return -std::numeric_limits<double>::infinity();
        sum += v * (std::log(w) - std::log(v));
    }
    return sum;
}

double PsiCheck::psi() const { return std::exp(log_psi); }
double PsiCheck::bound() const { return std::exp(log_bound); }
bool PsiCheck::within_bound() const { return log_psi <= log_bound + std::log1p(1e-9); }

PsiCheck psi_bound_check(const Eigen::MatrixXd& m, double d, const FlowTable& l) {
    check_birkhoff(m);
    const auto k = static_cast<int>(m.rows());
    const FlowViolation violation = flow_violation(m, d, l);
    if (violation.amount > 1e-10 * std::max(1.0, d))
        throw InputError("flow table infeasible: worst violated constraint " + violation.constraint + " (by " +
                         std::to_string(violation.amount) + ")");
    PsiCheck out;
    const auto pairs = flow_pairs(k);
    double log_num = 0;
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) log_num += d * xlogx(m(p, q));
    double log_den = 0;
    for (double v : l.values) log_den += xlogx(std::max(v, 0.0));
    out.log_psi = log_num - log_den;
    double total = 0;
    for (const auto& [p, q, r, s] : pairs) total += 2 * m(p, q) * m(r, s);
    out.log_bound = 0.5 * d * k * std::log(total / (d * k));
    out.maximizer = psi_maximizer(m, d);
    return out;
}

FlowTable perturb_within_null_space(const Eigen::MatrixXd& m, const FlowTable& l, Philox& rng, double fraction) {
    const auto k = static_cast<int>(m.rows());
    const auto pairs = flow_pairs(k);
    // Coordinates touching a zero-mass label must stay at zero.
    std::vector<std::size_t> free;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        const auto& [p, q, r, s] = pairs[e];
        if (m(p, q) > 0 && m(r, s) > 0) free.push_back(e);
    }
    const auto cols = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(k * k, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        const auto& [p, q, r, s] = pairs[free[static_cast<std::size_t>(c)]];
        incidence(p * k + q, c) = 1;
        incidence(r * k + s, c) = 1;
    }
    Eigen::VectorXd z(cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        // Box-Muller normal deviate.
        const double u1 = 1.0 - rng.uniform01();
        const double u2 = rng.uniform01();
        z(c) = std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
    }
    const Eigen::MatrixXd gram = incidence * incidence.transpose();
    const Eigen::VectorXd y = gram.completeOrthogonalDecomposition().solve(incidence * z);
    const Eigen::VectorXd direction = z - incidence.transpose() * y;

    double limit = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < cols; ++c)
        if (direction(c) < 0) limit = std::min(limit, l.values[free[static_cast<std::size_t>(c)]] / -direction(c));
    if (!std::isfinite(limit)) limit = 1.0 / std::max(1e-300, direction.lpNorm<Eigen::Infinity>());
    FlowTable out = l;
    for (Eigen::Index c = 0; c < cols; ++c)
        out.values[free[static_cast<std::size_t>(c)]] += fraction * limit * direction(c);
    for (auto& v : out.values) v = std::max(v, 0.0);
    return out;
}

}  // namespace regchrom
