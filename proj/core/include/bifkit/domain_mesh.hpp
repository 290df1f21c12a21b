#pragma once

#include "bifkit/tridiagonal.hpp"

#include <Eigen/Core>

#include <span>
#include <string>

namespace bifkit {

/// The domain: an interval (0, L) or a ball of radius R in dimension d <= 3,
/// the latter restricted to radially symmetric functions.
struct DomainSpec {
    enum class Kind { Interval, Ball };

    Kind kind = Kind::Interval;
    double extent = 1.0;  // L for Interval, R for Ball
    int dimension = 1;    // spatial dimension of the ball; 1 for Interval

    static DomainSpec interval(double length) { return {Kind::Interval, length, 1}; }
    static DomainSpec ball(double radius, int dimension) { return {Kind::Ball, radius, dimension}; }

    std::string describe() const;
};

/// Interior grid of a domain with Dirichlet boundary. For an interval the
/// nodes are the vertices i*h, i = 1..m, h = L/(m+1). For a ball the nodes are
/// cell centres r_i = (i - 1/2) h with h = R/(m + 1/2), so that the boundary
/// r = R is the (excluded) node m+1 and r = 0 is a cell face.
///
/// Quadrature weights carry the radial measure r^{d-1} h (the constant surface
/// area of the unit sphere is dropped; it multiplies every integral equally).
class Mesh {
public:
    Mesh(DomainSpec domain, Eigen::VectorXd nodes, Eigen::VectorXd weights,
         Eigen::VectorXd face_coefficients, double spacing);

    const DomainSpec& domain() const { return domain_; }
    Eigen::Index size() const { return nodes_.size(); }
    double spacing() const { return spacing_; }
    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    /// Flux coefficients r^{d-1} at the m+1 cell faces between consecutive
    /// nodes, including the boundary faces on either side.
    const Eigen::VectorXd& face_coefficients() const { return faces_; }

    /// Quadrature of a grid function.
    double integrate(const Eigen::VectorXd& values) const { return weights_.dot(values); }
    double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
        return weights_.dot(x.cwiseProduct(y));
    }
    double l2_norm(const Eigen::VectorXd& x) const;

private:
    DomainSpec domain_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd faces_;
    double spacing_;
};

Mesh build_mesh(const DomainSpec& spec, Eigen::Index m);

enum class OperatorKind { Stiffness, Mass, WeightedMass };

/// Assembled symmetric operator. Stiffness is the weak form of -Δ with
/// Dirichlet rows eliminated; Mass and WeightedMass are diagonal (lumped).
struct Operator {
    OperatorKind kind;
    SymTridiag matrix;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix.apply(x); }
    bool is_diagonal() const { return kind != OperatorKind::Stiffness; }
};

Operator assemble(const Mesh& mesh, OperatorKind kind);

/// Weighted mass with nodal weight function rho (e.g. rho = omega^2).
Operator assemble_weighted_mass(const Mesh& mesh, std::span<const double> rho);

/// Mesh together with its stiffness and mass operators; built once, shared
/// read-only by every later stage.
struct Discretization {
    Mesh mesh;
    Operator stiffness;
    Operator mass;

    /// Strong-form discrete Laplacian -Δ_h u = M^{-1} K u.
    Eigen::VectorXd minus_laplacian(const Eigen::VectorXd& u) const;
};

Discretization make_discretization(const DomainSpec& spec, Eigen::Index m);

struct PrincipalEigenpair {
    double lambda1;
    Eigen::VectorXd phi1;  // mass-normalized, positive at every node
};

/// Smallest eigenvalue of K phi = Λ M phi.
PrincipalEigenpair principal_eigenpair(const Operator& stiffness, const Operator& mass);

}  // namespace bifkit
