#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace spml {

/// A finite atomic measure space: sites with strictly positive weights.
/// All function spaces in the library are weighted l2 spaces over one
/// of these.
class MeasureSpace {
public:
    explicit MeasureSpace(Eigen::VectorXd weights,
                          std::vector<std::string> labels = {})
        : weights_(std::move(weights)), labels_(std::move(labels)) {
        if (weights_.size() < 1)
            throw std::invalid_argument("measure space needs at least one site");
        for (Eigen::Index i = 0; i < weights_.size(); ++i)
            if (!(weights_[i] > 0.0))
                throw std::invalid_argument("measure weights must be positive");
        if (!labels_.empty() &&
            labels_.size() != static_cast<std::size_t>(weights_.size()))
            throw std::invalid_argument("label/weight count mismatch");
    }

    Eigen::Index size() const { return weights_.size(); }
    const Eigen::VectorXd& weights() const { return weights_; }
    const std::vector<std::string>& labels() const { return labels_; }

    double total_mass() const { return weights_.sum(); }

private:
    Eigen::VectorXd weights_;
    std::vector<std::string> labels_;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

inline SpacePtr make_space(Eigen::VectorXd weights,
                           std::vector<std::string> labels = {}) {
    return std::make_shared<MeasureSpace>(std::move(weights), std::move(labels));
}

inline SpacePtr uniform_space(Eigen::Index n, double weight = 1.0) {
    return make_space(Eigen::VectorXd::Constant(n, weight));
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->size() == b->size() && a->weights() == b->weights();
}

}  // namespace spml
