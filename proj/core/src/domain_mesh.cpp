#include "bifkit/domain_mesh.hpp"

#include "bifkit/error.hpp"

#include <cmath>
#include <sstream>

namespace bifkit {

namespace {

constexpr Eigen::Index kMinPoints = 4;

double radial_power(double r, int dimension) {
    return dimension == 1 ? 1.0 : std::pow(r, dimension - 1);
}

}  // namespace

std::string DomainSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind == Kind::Interval) {
        os << "interval(L=" << extent << ")";
    } else {
        os << "ball(R=" << extent << ",d=" << dimension << ")";
    }
    return os.str();
}

Mesh::Mesh(DomainSpec domain, Eigen::VectorXd nodes, Eigen::VectorXd weights,
           Eigen::VectorXd face_coefficients, double spacing)
    : domain_(domain),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      faces_(std::move(face_coefficients)),
      spacing_(spacing) {}

double Mesh::l2_norm(const Eigen::VectorXd& x) const { return std::sqrt(inner(x, x)); }

Mesh build_mesh(const DomainSpec& spec, Eigen::Index m) {
    if (!(spec.extent > 0.0) || !std::isfinite(spec.extent)) {
        throw Error(ErrorCode::InvalidDomain, "domain extent must be positive, got " + spec.describe());
    }
    if (spec.kind == DomainSpec::Kind::Ball && (spec.dimension < 1 || spec.dimension > 3)) {
        throw Error(ErrorCode::InvalidDomain, "ball dimension must be 1, 2 or 3");
    }
    if (m < kMinPoints) {
        throw Error(ErrorCode::InvalidMesh, "need at least 4 interior points, got " + std::to_string(m));
    }

    Eigen::VectorXd nodes(m);
    Eigen::VectorXd weights(m);
    Eigen::VectorXd faces(m + 1);

    if (spec.kind == DomainSpec::Kind::Interval) {
        const double h = spec.extent / static_cast<double>(m + 1);
        for (Eigen::Index i = 0; i < m; ++i) nodes[i] = static_cast<double>(i + 1) * h;
        weights.setConstant(h);
        faces.setOnes();
        return Mesh(spec, std::move(nodes), std::move(weights), std::move(faces), h);
    }

    const int d = spec.dimension;
    const double h = spec.extent / (static_cast<double>(m) + 0.5);
    for (Eigen::Index i = 0; i < m; ++i) {
        nodes[i] = (static_cast<double>(i) + 0.5) * h;
        weights[i] = h * radial_power(nodes[i], d);
    }
    // Face j sits at r = j*h. The face at r = 0 carries no flux: the ghost value
    // mirrors the first node (u'(0) = 0).
    faces[0] = 0.0;
    for (Eigen::Index j = 1; j <= m; ++j) faces[j] = radial_power(static_cast<double>(j) * h, d);
    return Mesh(spec, std::move(nodes), std::move(weights), std::move(faces), h);
}

Operator assemble(const Mesh& mesh, OperatorKind kind) {
    const Eigen::Index m = mesh.size();
    SymTridiag a{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m - 1)};
    switch (kind) {
        case OperatorKind::Stiffness: {
            const double h = mesh.spacing();
            const Eigen::VectorXd& c = mesh.face_coefficients();
            for (Eigen::Index i = 0; i < m; ++i) {
                a.diag[i] = (c[i] + c[i + 1]) / h;
                if (i + 1 < m) a.off[i] = -c[i + 1] / h;
            }
            break;
        }
        case OperatorKind::Mass:
            a.diag = mesh.weights();
            break;
        case OperatorKind::WeightedMass:
            throw Error(ErrorCode::InvalidConfig, "weighted mass needs a weight; use assemble_weighted_mass");
    }
    return Operator{kind, std::move(a)};
}

Operator assemble_weighted_mass(const Mesh& mesh, std::span<const double> rho) {
    const Eigen::Index m = mesh.size();
    if (static_cast<Eigen::Index>(rho.size()) != m) {
        throw Error(ErrorCode::InvalidMesh, "weight function does not match the mesh");
    }
    SymTridiag a{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m - 1)};
    for (Eigen::Index i = 0; i < m; ++i) a.diag[i] = mesh.weights()[i] * rho[static_cast<std::size_t>(i)];
    return Operator{OperatorKind::WeightedMass, std::move(a)};
}

Eigen::VectorXd Discretization::minus_laplacian(const Eigen::VectorXd& u) const {
    return stiffness.apply(u).cwiseQuotient(mesh.weights());
}

Discretization make_discretization(const DomainSpec& spec, Eigen::Index m) {
    Mesh mesh = build_mesh(spec, m);
    Operator k = assemble(mesh, OperatorKind::Stiffness);
    Operator mass = assemble(mesh, OperatorKind::Mass);
    return Discretization{std::move(mesh), std::move(k), std::move(mass)};
}

PrincipalEigenpair principal_eigenpair(const Operator& stiffness, const Operator& mass) {
    if (stiffness.matrix.size() != mass.matrix.size() || !mass.is_diagonal()) {
        throw Error(ErrorCode::SolverFailure, "operators do not come from the same mesh");
    }
    const Eigen::VectorXd& b = mass.matrix.diag;
    const double lambda1 = pencil_eigenvalue(stiffness.matrix, b, 0);
    Eigen::VectorXd phi = pencil_eigenvector(stiffness.matrix, b, lambda1);
    if (phi.minCoeff() <= 0.0) {
        throw Error(ErrorCode::SolverFailure, "principal eigenvector changes sign");
    }
    return {lambda1, std::move(phi)};
}

}  // namespace bifkit
