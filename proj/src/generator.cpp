#include "spml/generator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace spml {

void ConductanceGraph::validate() const {
    if (!space) throw std::invalid_argument("conductance graph needs a space");
    const Eigen::Index n = space->size();
    if (conductances.rows() != n || conductances.cols() != n)
        throw std::invalid_argument("conductance matrix size mismatch");
    if (killing.size() != n)
        throw std::invalid_argument("killing vector size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (conductances(i, i) != 0.0)
            throw std::invalid_argument("conductance diagonal must be zero");
        if (killing[i] < 0.0)
            throw std::invalid_argument("killing rates must be nonnegative");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (conductances(i, j) < 0.0)
                throw std::invalid_argument("conductances must be nonnegative");
            if (conductances(i, j) != conductances(j, i))
                throw std::invalid_argument("conductances must be symmetric");
        }
    }
}

Generator::Generator(SpacePtr space, Eigen::VectorXd thetas,
                     Eigen::MatrixXd basis, GeneratorKind kind)
    : space_(std::move(space)),
      thetas_(std::move(thetas)),
      basis_(std::move(basis)),
      kind_(kind) {
    if (!space_) throw std::invalid_argument("generator needs a space");
    const Eigen::Index n = space_->size();
    if (thetas_.size() != n || basis_.rows() != n || basis_.cols() != n)
        throw std::invalid_argument("spectral data size mismatch");
    for (Eigen::Index k = 0; k < n; ++k)
        if (thetas_[k] < 0.0)
            throw std::invalid_argument("generator must be negative semidefinite");
}

Eigen::VectorXd Generator::to_spectral(const Eigen::VectorXd& u) const {
    return basis_.transpose() * (space_->weights().asDiagonal() * u);
}

Eigen::VectorXd Generator::from_spectral(const Eigen::VectorXd& coeffs) const {
    return basis_ * coeffs;
}

Field Generator::apply_multiplier(const std::function<double(double)>& m,
                                  const Field& u) const {
    require_bound(u);
    Eigen::VectorXd c = to_spectral(u.values());
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= m(thetas_[k]);
    return Field(space_, from_spectral(c));
}

Eigen::MatrixXd Generator::multiplier_matrix(
    const std::function<double(double)>& m) const {
    Eigen::VectorXd d(thetas_.size());
    for (Eigen::Index k = 0; k < d.size(); ++k) d[k] = m(thetas_[k]);
    return basis_ * d.asDiagonal() * basis_.transpose() *
           space_->weights().asDiagonal();
}

Field Generator::apply(const Field& u) const {
    return apply_multiplier([](double th) { return -th; }, u);
}

void Generator::require_bound(const Field& u) const {
    if (!same_space(space_, u.space()))
        throw std::invalid_argument("field not bound to the generator's space");
}

namespace {

Generator decompose(const SpacePtr& space, const Eigen::MatrixXd& form,
                    GeneratorKind kind) {
    // Symmetrize against the measure: S = -D^{-1/2} A D^{-1/2} with A the
    // (positive semidefinite) form matrix, then map eigenvectors back with
    // D^{-1/2} so they come out orthonormal in L2(mu).
    const Eigen::VectorXd& mu = space->weights();
    Eigen::VectorXd dinv_sqrt = mu.array().sqrt().inverse();
    Eigen::MatrixXd s =
        -(dinv_sqrt.asDiagonal() * form * dinv_sqrt.asDiagonal());
    s = 0.5 * (s + s.transpose());  // scrub roundoff asymmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");

    // Ascending eigenvalues of S = descending -theta; flip to ascending theta.
    const Eigen::Index n = space->size();
    Eigen::VectorXd thetas(n);
    Eigen::MatrixXd basis(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double theta = -es.eigenvalues()[n - 1 - k];
        thetas[k] = std::max(theta, 0.0);  // clip eigensolver roundoff
        basis.col(k) = dinv_sqrt.asDiagonal() * es.eigenvectors().col(n - 1 - k);
    }
    return Generator(space, std::move(thetas), std::move(basis), kind);
}

}  // namespace

Generator build_conductance_generator(const ConductanceGraph& graph) {
    graph.validate();
    const Eigen::Index n = graph.space->size();
    Eigen::MatrixXd form = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double degree = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            degree += graph.conductances(i, j);
            form(i, j) = -graph.conductances(i, j);
        }
        form(i, i) = degree + graph.killing[i];
    }
    return decompose(graph.space, form, GeneratorKind::Conductance);
}

Generator build_weighted_generator(Eigen::Index n, double h,
                                   const Eigen::VectorXd& density) {
    if (n < 1) throw std::invalid_argument("grid needs at least one point");
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    if (density.size() != n)
        throw std::invalid_argument("density length does not match grid size");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(density[i] > 0.0))
            throw std::invalid_argument("density must be positive everywhere");

    Eigen::VectorXd mu = density.array().square() * h;
    ConductanceGraph graph{make_space(mu), Eigen::MatrixXd::Zero(n, n),
                           Eigen::VectorXd::Zero(n)};
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        double rho2_edge =
            0.5 * (density[i] * density[i] + density[i + 1] * density[i + 1]);
        graph.conductances(i, i + 1) = rho2_edge / (h * h);
        graph.conductances(i + 1, i) = graph.conductances(i, i + 1);
    }
    // Same assembly as the conductance builder, tagged with its origin.
    Generator g = build_conductance_generator(graph);
    return Generator(g.space(), g.thetas(), g.eigenbasis(),
                     GeneratorKind::WeightedDensity);
}

Generator fractional_power(const Generator& gen, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("fractional power needs alpha in (0,1]");
    if (alpha == 1.0)
        return Generator(gen.space(), gen.thetas(), gen.eigenbasis(), gen.kind());
    Eigen::VectorXd thetas = gen.thetas();
    for (Eigen::Index k = 0; k < thetas.size(); ++k)
        thetas[k] = std::pow(thetas[k], alpha);
    return Generator(gen.space(), std::move(thetas), gen.eigenbasis(),
                     GeneratorKind::Fractional);
}

Field semigroup_apply(const Generator& gen, double t, const Field& u) {
    if (t < 0.0) throw std::invalid_argument("semigroup time must be nonnegative");
    return gen.apply_multiplier(
        [t](double th) { return std::exp(-th * t); }, u);
}

Field resolvent_apply(const Generator& gen, double alpha, const Field& u,
                      ResolventPower power) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("resolvent shift must be positive");
    if (power == ResolventPower::Full)
        return gen.apply_multiplier(
            [alpha](double th) { return 1.0 / (alpha + th); }, u);
    return gen.apply_multiplier(
        [alpha](double th) { return 1.0 / std::sqrt(alpha + th); }, u);
}

GammaTransformResult gamma_transform(const Generator& gen, double r,
                                     const Field& f) {
    if (!(r > 0.0)) throw std::invalid_argument("gamma transform needs r > 0");
    gen.require_bound(f);

    Field spectral = gen.apply_multiplier(
        [r](double th) { return std::pow(1.0 + th, -r / 2.0); }, f);

    // Substitute s = e^x. The lower cutoff drives the truncation error
    // (the s -> 0 tail contributes O(s_lo^{r/2})), so it sits at e^-60;
    // above s ~ e^6 the e^{-s} factor is already below 1e-170.
    const double x_lo = -60.0, dx = 0.01;
    const int steps = 6600;  // x in [-60, 6]
    const double norm = 1.0 / std::tgamma(r / 2.0);
    Eigen::VectorXd coeffs = gen.to_spectral(f.values());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.size());
    for (int i = 0; i <= steps; ++i) {
        double x = x_lo + i * dx;
        double s = std::exp(x);
        double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        double base = w * dx * norm * std::pow(s, r / 2.0) * std::exp(-s);
        for (Eigen::Index k = 0; k < coeffs.size(); ++k)
            out[k] += base * std::exp(-gen.thetas()[k] * s) * coeffs[k];
    }
    Field quadrature(f.space(), gen.from_spectral(out));
    return {std::move(spectral), std::move(quadrature)};
}

ConductanceGraph path_graph(Eigen::Index n, double conductance, double weight) {
    ConductanceGraph graph{uniform_space(n, weight),
                           Eigen::MatrixXd::Zero(n, n),
                           Eigen::VectorXd::Zero(n)};
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        graph.conductances(i, i + 1) = conductance;
        graph.conductances(i + 1, i) = conductance;
    }
    return graph;
}

ConductanceGraph two_point_graph() { return path_graph(2); }

}  // namespace spml
