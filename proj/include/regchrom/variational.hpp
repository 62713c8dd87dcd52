#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regchrom/rng.hpp"

namespace regchrom {

/// phi(M) = -(1/k) sum m log m + (d/2) log(1 - 2/k + (1/k^2) sum m^2), with
/// 0 log 0 = 0. DomainError on negative entries, InputError when M is not
/// doubly stochastic within 1e-9.
double phi(const Eigen::MatrixXd& m, double d);

/// phi(J/k) = log k + d log(1 - 1/k).
double phi_center(int k, double d);

/// 2(k-1) ln(k-1).
double colourability_threshold(int k);

/// phi(J/k) - phi(M) - (d_{k-1} - d)/(4(k-1)^2) (sum m^2 - 1), which the
/// Achlioptas-Naor inequality says is non-negative. DomainError if d >= d_{k-1}.
double an_bound_gap(const Eigen::MatrixXd& m, double d);

/// Sinkhorn normalisation of i.i.d. Exp(1) entries (200 sweeps or defect < 1e-12).
Eigen::MatrixXd random_doubly_stochastic(int k, Philox& rng);

/// Largest deviation of a row or column sum from 1.
double stochastic_defect(const Eigen::MatrixXd& m);

/// Euclidean projection onto the Birkhoff polytope by Dykstra's alternating
/// projections between the affine unit-margin set and the non-negative orthant.
Eigen::MatrixXd project_birkhoff(const Eigen::MatrixXd& x, int max_sweeps = 20000, double tol = 1e-15);

struct PhiOptions {
    int restarts = 50;
    double tol = 1e-12;        // stop once an accepted step moves M by less than tol (sup norm)
    int max_iterations = 200000;
    std::uint64_t seed = 0;
    int workers = 1;
    std::optional<Eigen::MatrixXd> start;  // replaces the first random start
};

struct RestartTrace {
    double phi = 0;
    int iterations = 0;
    bool converged = false;
};

struct PhiOptimum {
    Eigen::MatrixXd m;
    double phi = 0;
    double phi_center = 0;
    double distance_to_center = 0;  // ||M* - J/k||_inf
    bool converged = false;         // every restart met the tolerance
    bool below_threshold = false;   // d < d_{k-1}; the argmax contract applies only then
    bool beats_center = false;      // a maximiser with phi > phi(J/k) + 1e-9 was found
    std::vector<RestartTrace> trace;
};

/// Multistart projected gradient ascent of phi over the Birkhoff polytope,
/// with backtracking step halving from 1.0. Restarts are independent and
/// merged by maximum phi (ties broken by lexicographically smaller M).
PhiOptimum maximize_phi(int d, int k, const PhiOptions& options = {});

/// Coordinates of a flow table: unordered label pairs {(p,q),(r,s)} with p < r and q != s.
std::vector<std::array<int, 4>> flow_pairs(int k);

struct FlowTable {
    int k = 0;
    std::vector<double> values;  // aligned with flow_pairs(k)
};

/// Worst violation of the marginal constraints sum_{r!=p, s!=q} l_pqrs = d m_pq.
struct FlowViolation {
    double amount = 0;
    std::string constraint;
};
FlowViolation flow_violation(const Eigen::MatrixXd& m, double d, const FlowTable& l);

/// A feasible table for M via symmetric diagonal scaling of m_pq m_rs.
FlowTable feasible_flow(const Eigen::MatrixXd& m, double d);

/// L*_{pqrs} = dk m_pq m_rs / sum_{p'!=r', q'!=s'} m_p'q' m_r's'.
FlowTable psi_maximizer(const Eigen::MatrixXd& m, double d);

/// log of prod (m_pq m_rs / l)^l, which coincides with log psi(L) on feasible tables.
double log_psi_hat(const Eigen::MatrixXd& m, const FlowTable& l);

struct PsiCheck {
    double log_psi = 0;
    double log_bound = 0;  // (dk/2) log(S / dk)
    FlowTable maximizer;
    double psi() const;
    double bound() const;
    bool within_bound() const;  // psi <= bound (1 + 1e-9)
};

/// Evaluates psi(L) = prod m^{d m} / prod l^l for a feasible L (InputError
/// naming the worst violated constraint otherwise) against its upper bound.
PsiCheck psi_bound_check(const Eigen::MatrixXd& m, double d, const FlowTable& l);

/// Moves L along a random direction of the marginal-preserving null space,
/// scaled so every coordinate stays non-negative; `fraction` in (0, 1) of the
/// largest admissible step.
FlowTable perturb_within_null_space(const Eigen::MatrixXd& m, const FlowTable& l, Philox& rng, double fraction);

}  // namespace regchrom
