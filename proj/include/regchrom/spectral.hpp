#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace regchrom {

/// f^(p) for p = 1..k: Helmert-style orthonormal basis of R^k whose last
/// element is the normalised all-ones vector.
Eigen::VectorXd basis_vector(int k, int p);

/// All f^(p,q) = f^(p) (x) f^(q), ordered p-major: entry (p-1)*k + (q-1).
std::vector<Eigen::VectorXd> basis_f(int k);

/// Largest |<f_i, f_j> - delta_ij| over a family of vectors.
double orthonormality_defect(const std::vector<Eigen::VectorXd>& family);

struct EigenClaim {
    double value = 0;
    int claimed_multiplicity = 0;
    int basis_multiplicity = 0;     // basis vectors assigned this eigenvalue
    int nullity = 0;                // dim ker(B - value I), from a rank-revealing QR
};

struct EigReport {
    std::string label;
    std::vector<EigenClaim> claims;
    double max_residual = 0;           // max ||B f - lambda f||_inf over the basis
    double orthonormality_defect = 0;
    double smallest_eigenvalue = 0;
    bool passed = false;
};

struct Evec2Report {
    EigReport shifted_difference;  // (J-I)^{(x)2} + (k-1)^2 I
    EigReport sum_square;          // (J+I)^{(x)2}
    bool passed() const { return shifted_difference.passed && sum_square.passed; }
};

inline constexpr double kSpectralTolerance = 1e-9;

Evec2Report verify_evec2(int k);

struct Evec3Report {
    double residual_a = 0;   // max |vec(A)^T f^(i,k)|, |vec(A)^T f^(k,j)|
    double lhs_b = 0;        // sum_{i,j<k} (vec(A)^T f^(i,j))^2
    double lhs_c = 0;        // vec(A~)^T (J+I)^{(x)2} vec(A~)
    double sum_squares = 0;  // sum a_ij^2
    double max_residual() const;
    bool passed = false;
};

/// A must be square with |row sums|, |column sums| <= 1e-12 (InputError otherwise).
Evec3Report evec3_identities(const Eigen::MatrixXd& a);

/// Column-stacked vectorisation.
Eigen::VectorXd vec(const Eigen::MatrixXd& a);

struct GaussDetReport {
    double numeric_det = 0;
    double formula_det = 0;   // r^{2k} (2k-2) (k-2)^{k-1}
    double det_rel_error = 0;
    std::optional<double> quadrature;      // tensor-grid value of the Gaussian integral (k <= 3)
    std::optional<double> closed_form;     // (2 pi)^{k/2} det(A)^{-1/2}
    std::optional<double> quad_rel_error;
    bool passed = false;
};

/// Determinant of r^2 (11^T + (k-2) I) against its closed form, plus the
/// Gaussian integral identity by quadrature when k <= 3.
GaussDetReport gaussian_det_check(int k, double r);

/// Trapezoid tensor-grid approximation of the integral of exp(-x^T A x / 2)
/// over R^dim, dim <= 3, A symmetric positive definite.
double gaussian_integral_quadrature(const Eigen::MatrixXd& a, int points_per_axis = 161);

}  // namespace regchrom
