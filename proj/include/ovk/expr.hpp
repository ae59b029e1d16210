#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ovk/errors.hpp"
#include "ovk/series.hpp"

namespace ovk {

// ===========================================================================
// Operator trees
//
// A right-hand side is described symbolically as a small expression tree over
// two formal arguments: `arg_u` (the frozen base point of the quasilinear
// form) and `arg_v` (the slot the linearity/convexity structure refers to).
// Trees are immutable and shared; all structural queries are precomputed at
// construction so repeated evaluation during sampling stays cheap.
// ===========================================================================

enum class ExprKind {
    Constant,   ///< fixed series, no arguments
    ArgU,       ///< first argument slot
    ArgV,       ///< second argument slot
    Derivative, ///< d/dx of the child
    Product,    ///< Cauchy product of the two children
    Sum,        ///< pointwise sum of the two children
    TimeScale,  ///< polynomial-in-t scalar factor applied to the child
};

class OperatorExpr;
using ExprPtr = std::shared_ptr<const OperatorExpr>;

class OperatorExpr {
public:
    // -- factories ----------------------------------------------------------

    static ExprPtr constant(PowerSeries g) {
        auto e = std::make_shared<OperatorExpr>(Private{}, ExprKind::Constant);
        e->value_ = std::move(g);
        return e;
    }

    static ExprPtr arg_u() {
        auto e = std::make_shared<OperatorExpr>(Private{}, ExprKind::ArgU);
        e->contains_u_ = true;
        return e;
    }

    static ExprPtr arg_v() {
        auto e = std::make_shared<OperatorExpr>(Private{}, ExprKind::ArgV);
        e->v_degree_ = 1;
        return e;
    }

    static ExprPtr dx(ExprPtr child) {
        require(child, "dx");
        auto e = std::make_shared<OperatorExpr>(Private{}, ExprKind::Derivative);
        e->inherit(*child);
        e->left_ = std::move(child);
        return e;
    }

    static ExprPtr mul(ExprPtr lhs, ExprPtr rhs) {
        require(lhs, "mul");
        require(rhs, "mul");
        auto e = std::make_shared<OperatorExpr>(Private{}, ExprKind::Product);
        e->combine(*lhs, *rhs);
        e->v_degree_ = saturate(lhs->v_degree_ + rhs->v_degree_);
        e->left_ = std::move(lhs);
        e->right_ = std::move(rhs);
        return e;
    }

    static ExprPtr add(ExprPtr lhs, ExprPtr rhs) {
        require(lhs, "add");
        require(rhs, "add");
        auto e = std::make_shared<OperatorExpr>(Private{}, ExprKind::Sum);
        e->combine(*lhs, *rhs);
        e->v_degree_ = std::max(lhs->v_degree_, rhs->v_degree_);
        e->left_ = std::move(lhs);
        e->right_ = std::move(rhs);
        return e;
    }

    /// p(t) * child with p given by its coefficient list (constant term first).
    static ExprPtr time_scale(std::vector<double> poly, ExprPtr child) {
        require(child, "tscale");
        if (poly.empty()) {
            throw StructuralError("tscale needs at least one polynomial coefficient");
        }
        auto e = std::make_shared<OperatorExpr>(Private{}, ExprKind::TimeScale);
        e->inherit(*child);
        e->contains_time_ = true;
        e->poly_ = std::move(poly);
        e->left_ = std::move(child);
        return e;
    }

    // -- structure ----------------------------------------------------------

    ExprKind kind() const noexcept { return kind_; }
    const ExprPtr& child() const noexcept { return left_; }
    const ExprPtr& lhs() const noexcept { return left_; }
    const ExprPtr& rhs() const noexcept { return right_; }
    const PowerSeries& value() const noexcept { return value_; }
    const std::vector<double>& poly() const noexcept { return poly_; }

    bool contains_u() const noexcept { return contains_u_; }
    bool contains_v() const noexcept { return v_degree_ > 0; }
    bool contains_time() const noexcept { return contains_time_; }

    /// Total degree in the second argument, saturated at 2 (2 means ">= 2").
    int v_degree() const noexcept { return v_degree_; }

    /// Affine in the second argument by construction.  This is the structural
    /// certificate behind the convexity property of the norm bound: affine
    /// maps composed with a norm are convex, no sampling required.
    bool linear_in_v() const noexcept { return v_degree_ <= 1; }

    // Constructor is effectively private (passkey); use the factories.
    struct Private {};
    OperatorExpr(Private, ExprKind kind) : kind_(kind) {}

private:
    static void require(const ExprPtr& p, const char* where) {
        if (!p) throw StructuralError(std::string(where) + ": missing child");
    }
    static int saturate(int d) { return d > 2 ? 2 : d; }

    void inherit(const OperatorExpr& c) {
        contains_u_ = c.contains_u_;
        contains_time_ = c.contains_time_;
        v_degree_ = c.v_degree_;
    }
    void combine(const OperatorExpr& l, const OperatorExpr& r) {
        contains_u_ = l.contains_u_ || r.contains_u_;
        contains_time_ = l.contains_time_ || r.contains_time_;
    }

    ExprKind kind_;
    ExprPtr left_;
    ExprPtr right_;
    PowerSeries value_;
    std::vector<double> poly_;
    bool contains_u_ = false;
    bool contains_time_ = false;
    int v_degree_ = 0;
};

/// Structural equality (same shape, same constants, bitwise-equal numbers).
inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case ExprKind::Constant:
            return a->value().coefficients() == b->value().coefficients();
        case ExprKind::ArgU:
        case ExprKind::ArgV:
            return true;
        case ExprKind::Derivative:
            return structurally_equal(a->child(), b->child());
        case ExprKind::Product:
        case ExprKind::Sum:
            return structurally_equal(a->lhs(), b->lhs()) &&
                   structurally_equal(a->rhs(), b->rhs());
        case ExprKind::TimeScale:
            return a->poly() == b->poly() && structurally_equal(a->child(), b->child());
    }
    return false;
}

namespace detail {

inline double horner(const std::vector<double>& p, double t) {
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * t + p[i];
    return v;
}

}  // namespace detail

/// Evaluate a tree at time t with the argument slots bound to u and v.
/// Products are capped at `max_degree`; caps propagate the truncation flag.
inline PowerSeries evaluate(const ExprPtr& e, double t, const PowerSeries& u,
                            const PowerSeries& v,
                            std::size_t max_degree = no_degree_cap) {
    if (!e) throw StructuralError("evaluate: empty expression");
    switch (e->kind()) {
        case ExprKind::Constant:
            return truncate(e->value(), max_degree);
        case ExprKind::ArgU:
            return truncate(u, max_degree);
        case ExprKind::ArgV:
            return truncate(v, max_degree);
        case ExprKind::Derivative:
            return derivative(evaluate(e->child(), t, u, v, max_degree));
        case ExprKind::Product:
            return cauchy_product(evaluate(e->lhs(), t, u, v, max_degree),
                                  evaluate(e->rhs(), t, u, v, max_degree), max_degree);
        case ExprKind::Sum:
            return evaluate(e->lhs(), t, u, v, max_degree) +
                   evaluate(e->rhs(), t, u, v, max_degree);
        case ExprKind::TimeScale:
            return detail::horner(e->poly(), t) *
                   evaluate(e->child(), t, u, v, max_degree);
    }
    throw StructuralError("evaluate: unknown node kind");
}

// ===========================================================================
// Problem description
// ===========================================================================

/// A concrete evolution problem  u' = A(t, u, u) + h(t, u),  u(0) = 0,
/// posed on the weighted scale with ball radius R and truncation degree N.
struct ProblemSpec {
    ExprPtr A;          ///< quasilinear part; may read both argument slots
    ExprPtr h;          ///< source term; must not read the second slot
    double R = 2.0;     ///< ball radius the constants are certified on
    std::size_t N = 64; ///< working truncation degree
    std::string label;

    ProblemSpec(ExprPtr A_, ExprPtr h_, double R_, std::size_t N_,
                std::string label_ = "problem")
        : A(std::move(A_)), h(std::move(h_)), R(R_), N(N_), label(std::move(label_)) {
        if (!A || !h) throw StructuralError("problem needs both A and h trees");
        if (h->contains_v()) {
            throw StructuralError("source term must not depend on the second argument");
        }
        if (!(R > 0.0)) {
            throw DomainError("ball radius must be positive, got " + std::to_string(R));
        }
        if (N < 1) throw DomainError("truncation degree must be at least 1");
    }
};

/// A(t, u, v) with the working degree cap applied throughout.
inline PowerSeries evaluate_A(const ProblemSpec& p, double t, const PowerSeries& u,
                              const PowerSeries& v) {
    return evaluate(p.A, t, u, v, p.N);
}

/// h(t, u); the second slot is structurally absent, bound to zero defensively.
inline PowerSeries evaluate_h(const ProblemSpec& p, double t, const PowerSeries& u) {
    return evaluate(p.h, t, u, PowerSeries{}, p.N);
}

}  // namespace ovk
