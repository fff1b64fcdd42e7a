#pragma once

#include "spml/measure_space.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace spml {

/// A function on a measure space, stored as one coefficient per site.
/// The same carrier is read in L2(mu), F_{1,2} or F*_{1,2} depending on
/// which norm a caller applies; membership is a norm choice, not a type.
class Field {
public:
    Field(SpacePtr space, Eigen::VectorXd values)
        : space_(std::move(space)), values_(std::move(values)) {
        if (!space_)
            throw std::invalid_argument("field needs a measure space");
        if (values_.size() != space_->size())
            throw std::invalid_argument("field length does not match space size");
        if (!values_.allFinite())
            throw std::invalid_argument("field entries must be finite");
    }

    static Field zero(const SpacePtr& space) {
        return Field(space, Eigen::VectorXd::Zero(space->size()));
    }
    static Field constant(const SpacePtr& space, double v) {
        return Field(space, Eigen::VectorXd::Constant(space->size(), v));
    }

    const SpacePtr& space() const { return space_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double operator[](Eigen::Index i) const { return values_[i]; }

    Field with_values(Eigen::VectorXd v) const {
        return Field(space_, std::move(v));
    }

    Field operator+(const Field& o) const {
        require_same_space(o);
        return with_values(values_ + o.values_);
    }
    Field operator-(const Field& o) const {
        require_same_space(o);
        return with_values(values_ - o.values_);
    }
    Field operator*(double s) const { return with_values(values_ * s); }

    void require_same_space(const Field& o) const {
        if (!same_space(space_, o.space_))
            throw std::invalid_argument("fields bound to different measure spaces");
    }

private:
    SpacePtr space_;
    Eigen::VectorXd values_;
};

inline Field operator*(double s, const Field& f) { return f * s; }

/// Weighted L2(mu) inner product of two coefficient vectors on `space`.
inline double l2_inner(const MeasureSpace& space, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v) {
    return (u.array() * space.weights().array() * v.array()).sum();
}

inline double l2_inner(const Field& u, const Field& v) {
    u.require_same_space(v);
    return l2_inner(*u.space(), u.values(), v.values());
}

inline double l2_norm(const Field& u) { return std::sqrt(l2_inner(u, u)); }

}  // namespace spml
