#include "regchrom/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "regchrom/errors.hpp"

namespace regchrom {

namespace {

Eigen::MatrixXd ones(int k) { return Eigen::MatrixXd::Ones(k, k); }
Eigen::MatrixXd eye(int k) { return Eigen::MatrixXd::Identity(k, k); }

int nullity(const Eigen::MatrixXd& b, double lambda) {
    const Eigen::MatrixXd shifted = b - lambda * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(shifted);
    qr.setThreshold(1e-10);
    return static_cast<int>(b.rows() - qr.rank());
}

struct Claimed {
    double value;
    int multiplicity;
};

// Checks B f^(p,q) = lambda(p,q) f^(p,q) for the whole basis and that each
// claimed eigenvalue has the claimed geometric multiplicity.
template <class EigenvalueOf>
EigReport check_basis(const std::string& label, const Eigen::MatrixXd& b, int k, EigenvalueOf eigenvalue_of,
                      const std::vector<Claimed>& claims) {
    EigReport report;
    report.label = label;
    const auto basis = basis_f(k);
    report.orthonormality_defect = orthonormality_defect(basis);
    report.smallest_eigenvalue = std::numeric_limits<double>::infinity();
    std::vector<int> assigned(claims.size(), 0);
    for (int p = 1; p <= k; ++p) {
        for (int q = 1; q <= k; ++q) {
            const auto& f = basis[static_cast<std::size_t>((p - 1) * k + (q - 1))];
            const double lambda = eigenvalue_of(p, q);
            report.max_residual = std::max(report.max_residual, (b * f - lambda * f).lpNorm<Eigen::Infinity>());
            const double rayleigh = f.dot(b * f);
            report.smallest_eigenvalue = std::min(report.smallest_eigenvalue, rayleigh);
            for (std::size_t c = 0; c < claims.size(); ++c)
                if (std::fabs(claims[c].value - lambda) <= kSpectralTolerance * std::max(1.0, std::fabs(lambda)))
                    ++assigned[c];
        }
    }
    int total = 0;
    bool multiplicities_ok = true;
    for (std::size_t c = 0; c < claims.size(); ++c) {
        EigenClaim claim;
        claim.value = claims[c].value;
        claim.claimed_multiplicity = claims[c].multiplicity;
        claim.basis_multiplicity = assigned[c];
        claim.nullity = nullity(b, claims[c].value);
        total += claims[c].multiplicity;
        multiplicities_ok = multiplicities_ok && claim.nullity == claim.claimed_multiplicity &&
                            claim.basis_multiplicity == claim.claimed_multiplicity;
        report.claims.push_back(claim);
    }
    report.passed = multiplicities_ok && total == k * k && report.max_residual <= kSpectralTolerance &&
                    report.orthonormality_defect <= kSpectralTolerance;
    return report;
}

}  // namespace

Eigen::VectorXd basis_vector(int k, int p) {
    if (k < 1 || p < 1 || p > k) throw InputError("basis_vector needs 1 <= p <= k");
    Eigen::VectorXd f = Eigen::VectorXd::Zero(k);
    if (p == k) {
        f.setConstant(1.0 / std::sqrt(static_cast<double>(k)));
        return f;
    }
    const double scale = std::sqrt(static_cast<double>(p) / (p + 1.0));
    for (int l = 0; l < p; ++l) f(l) = -scale / p;
    f(p) = scale;
    return f;
}

std::vector<Eigen::VectorXd> basis_f(int k) {
    if (k < 2) throw InputError("basis_f needs k >= 2");
    std::vector<Eigen::VectorXd> single;
    for (int p = 1; p <= k; ++p) single.push_back(basis_vector(k, p));
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(k * k));
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            out.emplace_back(Eigen::kroneckerProduct(single[static_cast<std::size_t>(p)],
                                                     single[static_cast<std::size_t>(q)]));
    return out;
}

double orthonormality_defect(const std::vector<Eigen::VectorXd>& family) {
    double worst = 0;
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i; j < family.size(); ++j)
            worst = std::max(worst, std::fabs(family[i].dot(family[j]) - (i == j ? 1.0 : 0.0)));
    return worst;
}

Evec2Report verify_evec2(int k) {
    if (k < 3) throw InputError("verify_evec2 needs k >= 3");
    const double kk = k;
    const Eigen::MatrixXd diff = ones(k) - eye(k);
    const Eigen::MatrixXd sum = ones(k) + eye(k);
    const Eigen::MatrixXd first =
        Eigen::kroneckerProduct(diff, diff).eval() + (kk - 1) * (kk - 1) * eye(k * k);
    const Eigen::MatrixXd second = Eigen::kroneckerProduct(sum, sum).eval();

    Evec2Report out;
    out.shifted_difference = check_basis(
        "(J-I)^2 + (k-1)^2 I", first, k,
        [&](int p, int q) {
            if (p < k && q < k) return kk * kk - 2 * kk + 2;
            if (p == k && q == k) return 2 * (kk - 1) * (kk - 1);
            return (kk - 1) * (kk - 2);
        },
        {{kk * kk - 2 * kk + 2, (k - 1) * (k - 1)}, {(kk - 1) * (kk - 2), 2 * (k - 1)}, {2 * (kk - 1) * (kk - 1), 1}});
    const double expected_min = (kk - 1) * (kk - 2);
    if (std::fabs(out.shifted_difference.smallest_eigenvalue - expected_min) > kSpectralTolerance * kk * kk)
        out.shifted_difference.passed = false;

    out.sum_square = check_basis(
        "(J+I)^2", second, k,
        [&](int p, int q) {
            if (p < k && q < k) return 1.0;
            if (p == k && q == k) return (kk + 1) * (kk + 1);
            return kk + 1;
        },
        {{1.0, (k - 1) * (k - 1)}, {kk + 1, 2 * (k - 1)}, {(kk + 1) * (kk + 1), 1}});
    return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& a) {
    return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

double Evec3Report::max_residual() const {
    const double scale = std::max(1.0, sum_squares);
    return std::max({residual_a, std::fabs(lhs_b - sum_squares) / scale, std::fabs(lhs_c - sum_squares) / scale});
}

Evec3Report evec3_identities(const Eigen::MatrixXd& a) {
    const auto k = static_cast<int>(a.rows());
    if (a.rows() != a.cols() || k < 2) throw InputError("evec3_identities needs a square matrix with k >= 2");
    const double row_defect = a.rowwise().sum().cwiseAbs().maxCoeff();
    const double col_defect = a.colwise().sum().cwiseAbs().maxCoeff();
    if (row_defect > 1e-12 || col_defect > 1e-12)
        throw InputError("matrix rows and columns must sum to zero (defect " +
                         std::to_string(std::max(row_defect, col_defect)) + ")");
    Evec3Report out;
    const Eigen::VectorXd v = vec(a);
    const auto basis = basis_f(k);
    for (int i = 1; i <= k; ++i) {
        out.residual_a = std::max(out.residual_a, std::fabs(v.dot(basis[static_cast<std::size_t>((i - 1) * k + (k - 1))])));
        out.residual_a = std::max(out.residual_a, std::fabs(v.dot(basis[static_cast<std::size_t>((k - 1) * k + (i - 1))])));
    }
    for (int i = 1; i < k; ++i)
        for (int j = 1; j < k; ++j) {
            const double c = v.dot(basis[static_cast<std::size_t>((i - 1) * k + (j - 1))]);
            out.lhs_b += c * c;
        }
    const Eigen::MatrixXd trimmed = a.topLeftCorner(k - 1, k - 1);
    const Eigen::MatrixXd s = ones(k - 1) + eye(k - 1);
    const Eigen::VectorXd vt = vec(trimmed);
    out.lhs_c = vt.dot(Eigen::kroneckerProduct(s, s).eval() * vt);
    out.sum_squares = a.squaredNorm();
    out.passed = out.max_residual() <= kSpectralTolerance;
    return out;
}

double gaussian_integral_quadrature(const Eigen::MatrixXd& a, int points_per_axis) {
    const auto dim = static_cast<int>(a.rows());
    if (dim < 1 || dim > 3 || a.cols() != dim) throw InputError("quadrature supports dimension 1..3");
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) throw InputError("matrix is not positive definite");
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(dim, dim));
    // The integrand is below e^{-72} outside 12 standard deviations on every axis.
    const double half_width = 12.0 * std::sqrt(cov.diagonal().maxCoeff());
    const double h = 2 * half_width / (points_per_axis - 1);
    std::vector<double> grid(static_cast<std::size_t>(points_per_axis));
    for (int i = 0; i < points_per_axis; ++i) grid[static_cast<std::size_t>(i)] = -half_width + i * h;

    double total = 0;
    Eigen::VectorXd x(dim);
    const int n1 = points_per_axis;
    const int n2 = dim >= 2 ? points_per_axis : 1;
    const int n3 = dim >= 3 ? points_per_axis : 1;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int l = 0; l < n3; ++l) {
                x(0) = grid[static_cast<std::size_t>(i)];
                if (dim >= 2) x(1) = grid[static_cast<std::size_t>(j)];
                if (dim >= 3) x(2) = grid[static_cast<std::size_t>(l)];
                // Endpoints carry negligible mass, so plain sums equal the trapezoid rule.
                total += std::exp(-0.5 * x.dot(a * x));
            }
    return total * std::pow(h, dim);
}

GaussDetReport gaussian_det_check(int k, double r) {
    if (k < 3 || !(r > 0)) throw InputError("gaussian_det_check needs k >= 3 and r > 0");
    const double kk = k;
    const Eigen::MatrixXd a = r * r * (ones(k) + (kk - 2) * eye(k));
    GaussDetReport out;
    out.numeric_det = a.partialPivLu().determinant();
    out.formula_det = std::pow(r, 2 * kk) * (2 * kk - 2) * std::pow(kk - 2, kk - 1);
    out.det_rel_error = std::fabs(out.numeric_det - out.formula_det) / std::fabs(out.formula_det);
    out.passed = out.det_rel_error <= kSpectralTolerance;
    if (k <= 3) {
        out.quadrature = gaussian_integral_quadrature(a);
        out.closed_form = std::pow(2 * std::numbers::pi, kk / 2) / std::sqrt(out.formula_det);
        out.quad_rel_error = std::fabs(*out.quadrature - *out.closed_form) / *out.closed_form;
        out.passed = out.passed && *out.quad_rel_error <= 1e-6;
    }
    return out;
}

}  // namespace regchrom
