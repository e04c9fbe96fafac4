#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "cardest/error.hpp"

namespace cardest {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Algorithm { sgd, pa, rls };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

template <typename Scalar = double>
struct SgdParams {
    Scalar learning_rate = Scalar(1e-6);
    /// Bootstrap stops once |L_t - L_{t-1}| < tol * max(1, L_{t-1}).
    Scalar bootstrap_tolerance = Scalar(1e-4);
    int bootstrap_max_iterations = 10000;
};

template <typename Scalar = double>
struct PaParams {
    Scalar epsilon = Scalar(0.1);
    Scalar c = Scalar(1);
};

template <typename Scalar = double>
struct RlsParams {
    Scalar mu = Scalar(0.99);
    Scalar delta = Scalar(0.01);  ///< P_0 = I / delta
};

template <typename Scalar = double>
struct Hyperparameters {
    SgdParams<Scalar> sgd;
    PaParams<Scalar> pa;
    RlsParams<Scalar> rls;
};

struct BootstrapReport {
    int iterations = 0;
    bool converged = true;
};

// --- update rules ---------------------------------------------------------

template <typename DerivedW, typename DerivedX>
typename DerivedW::Scalar predict(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedX>& x) {
    if (w.size() != x.size()) throw DegenerateError("feature vector length does not match the model");
    return w.dot(x);
}

/// Cardinalities are non-negative; reports clamp, training keeps the raw value.
template <typename Scalar>
Scalar clamp_estimate(Scalar raw) {
    return raw < Scalar(0) ? Scalar(0) : raw;
}

template <typename DerivedW, typename DerivedX>
typename DerivedW::Scalar half_squared_loss(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedX>& x,
                                            typename DerivedW::Scalar y) {
    const auto r = predict(w, x) - y;
    return r * r / 2;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!m.allFinite()) throw DivergenceError(std::string(what) + " became non-finite");
}

/// One gradient step on half squared error: w <- w - eta (w.x - y) x.
template <typename Scalar>
void sgd_step(Vec<Scalar>& w, const Eigen::Ref<const Vec<Scalar>>& x, Scalar y, Scalar eta) {
    const Scalar residual = predict(w, x) - y;
    w.noalias() -= (eta * residual) * x;
    require_finite(w, "SGD weights");
}

/// PA-II regression step. Returns false (weights bitwise untouched) when the
/// epsilon-insensitive loss is zero.
template <typename Scalar>
bool pa2_step(Vec<Scalar>& w, const Eigen::Ref<const Vec<Scalar>>& x, Scalar y, Scalar epsilon, Scalar c) {
    const Scalar residual = y - predict(w, x);
    const Scalar loss = std::abs(residual) - epsilon;
    if (!(loss > Scalar(0))) return false;
    const Scalar norm2 = x.squaredNorm();
    if (norm2 == Scalar(0)) throw DegenerateError("PA update on an all-zero feature vector");
    const Scalar tau = loss / (norm2 + Scalar(1) / (Scalar(2) * c));
    w.noalias() += (residual > Scalar(0) ? tau : -tau) * x;
    require_finite(w, "PA weights");
    return true;
}

/// Exponentially weighted RLS:
///   k = P x / (mu + x' P x),  w <- w + k (y - w.x),  P <- (P - k x' P) / mu
/// P is re-symmetrized after every update.
template <typename Scalar>
void rls_step(Vec<Scalar>& w, Mat<Scalar>& P, const Eigen::Ref<const Vec<Scalar>>& x, Scalar y, Scalar mu) {
    const Vec<Scalar> px = P * x;
    const Scalar denom = mu + x.dot(px);
    const Vec<Scalar> gain = px / denom;
    w.noalias() += gain * (y - predict(w, x));
    P.noalias() -= gain * px.transpose();
    P /= mu;
    P = (P + P.transpose()).eval() / Scalar(2);
    require_finite(w, "RLS weights");
    require_finite(P, "RLS covariance");
}

// --- learners -------------------------------------------------------------

template <class M>
concept OnlineModel = requires(M m, const M& cm, const Eigen::VectorXd& x, double y) {
    { cm.predict(x) } -> std::convertible_to<double>;
    m.partial_fit(x, y);
    { m.bootstrap(x, y) } -> std::same_as<BootstrapReport>;
};

template <typename Scalar = double>
class SgdRegressor {
public:
    using Vector = Vec<Scalar>;
    static constexpr Algorithm algorithm = Algorithm::sgd;

    explicit SgdRegressor(Eigen::Index dim, SgdParams<Scalar> params = {})
        : w_(Vector::Zero(dim)), params_(params) {
        if (!(params_.learning_rate > Scalar(0))) throw DomainError("SGD learning rate must be positive");
    }

    Scalar predict(const Eigen::Ref<const Vector>& x) const { return cardest::predict(w_, x); }

    void partial_fit(const Eigen::Ref<const Vector>& x, Scalar y) {
        sgd_step(w_, x, y, params_.learning_rate);
        ++updates_;
    }

    /// Repeats the single-example step until the loss settles or the cap is hit.
    BootstrapReport bootstrap(const Eigen::Ref<const Vector>& x, Scalar y) {
        BootstrapReport report;
        Scalar prev = half_squared_loss(w_, x, y);
        for (report.iterations = 0; report.iterations < params_.bootstrap_max_iterations;) {
            partial_fit(x, y);
            ++report.iterations;
            const Scalar loss = half_squared_loss(w_, x, y);
            if (!std::isfinite(static_cast<double>(loss))) throw DivergenceError("SGD bootstrap loss became non-finite");
            const Scalar scale = prev > Scalar(1) ? prev : Scalar(1);
            if (std::abs(loss - prev) < params_.bootstrap_tolerance * scale) return report;
            prev = loss;
        }
        report.converged = false;
        return report;
    }

    const Vector& weights() const noexcept { return w_; }
    void set_weights(const Vector& w) { w_ = w; }
    std::size_t updates() const noexcept { return updates_; }
    const SgdParams<Scalar>& params() const noexcept { return params_; }

private:
    Vector w_;
    SgdParams<Scalar> params_;
    std::size_t updates_ = 0;
};

template <typename Scalar = double>
class PaRegressor {
public:
    using Vector = Vec<Scalar>;
    static constexpr Algorithm algorithm = Algorithm::pa;

    explicit PaRegressor(Eigen::Index dim, PaParams<Scalar> params = {}) : w_(Vector::Zero(dim)), params_(params) {
        if (!(params_.epsilon >= Scalar(0))) throw DomainError("PA epsilon must be non-negative");
        if (!(params_.c > Scalar(0))) throw DomainError("PA aggressiveness C must be positive");
    }

    Scalar predict(const Eigen::Ref<const Vector>& x) const { return cardest::predict(w_, x); }

    void partial_fit(const Eigen::Ref<const Vector>& x, Scalar y) {
        pa2_step(w_, x, y, params_.epsilon, params_.c);
        ++updates_;
    }

    BootstrapReport bootstrap(const Eigen::Ref<const Vector>& x, Scalar y) {
        partial_fit(x, y);
        return {1, true};
    }

    const Vector& weights() const noexcept { return w_; }
    void set_weights(const Vector& w) { w_ = w; }
    std::size_t updates() const noexcept { return updates_; }
    const PaParams<Scalar>& params() const noexcept { return params_; }

private:
    Vector w_;
    PaParams<Scalar> params_;
    std::size_t updates_ = 0;
};

template <typename Scalar = double>
class RlsRegressor {
public:
    using Vector = Vec<Scalar>;
    using Matrix = Mat<Scalar>;
    static constexpr Algorithm algorithm = Algorithm::rls;

    explicit RlsRegressor(Eigen::Index dim, RlsParams<Scalar> params = {})
        : w_(Vector::Zero(dim)), params_(params) {
        if (!(params_.mu > Scalar(0) && params_.mu <= Scalar(1))) throw DomainError("RLS forgetting factor must lie in (0, 1]");
        if (!(params_.delta > Scalar(0))) throw DomainError("RLS delta must be positive");
        P_ = Matrix::Identity(dim, dim) / params_.delta;
    }

    Scalar predict(const Eigen::Ref<const Vector>& x) const { return cardest::predict(w_, x); }

    void partial_fit(const Eigen::Ref<const Vector>& x, Scalar y) {
        rls_step(w_, P_, x, y, params_.mu);
        ++updates_;
    }

    BootstrapReport bootstrap(const Eigen::Ref<const Vector>& x, Scalar y) {
        partial_fit(x, y);
        return {1, true};
    }

    const Vector& weights() const noexcept { return w_; }
    void set_weights(const Vector& w) { w_ = w; }
    const Matrix& covariance() const noexcept { return P_; }
    std::size_t updates() const noexcept { return updates_; }
    const RlsParams<Scalar>& params() const noexcept { return params_; }

private:
    Vector w_;
    Matrix P_;
    RlsParams<Scalar> params_;
    std::size_t updates_ = 0;
};

/// Run-time choice among the double-precision learners.
class AnyRegressor {
public:
    using Impl = std::variant<SgdRegressor<double>, PaRegressor<double>, RlsRegressor<double>>;

    AnyRegressor(Algorithm algorithm, Eigen::Index dim, const Hyperparameters<double>& hp = {})
        : impl_(make(algorithm, dim, hp)) {}

    template <class Learner>
    explicit AnyRegressor(Learner learner) : impl_(std::move(learner)) {}

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        return std::visit([&](const auto& m) { return m.predict(x); }, impl_);
    }
    void partial_fit(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
        std::visit([&](auto& m) { m.partial_fit(x, y); }, impl_);
    }
    BootstrapReport bootstrap(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
        return std::visit([&](auto& m) { return m.bootstrap(x, y); }, impl_);
    }
    const Eigen::VectorXd& weights() const {
        return std::visit([](const auto& m) -> const Eigen::VectorXd& { return m.weights(); }, impl_);
    }
    void set_weights(const Eigen::VectorXd& w) {
        std::visit([&](auto& m) { m.set_weights(w); }, impl_);
    }
    Algorithm algorithm() const {
        return std::visit([](const auto& m) { return std::decay_t<decltype(m)>::algorithm; }, impl_);
    }
    std::size_t updates() const {
        return std::visit([](const auto& m) { return m.updates(); }, impl_);
    }
    const Impl& impl() const noexcept { return impl_; }

private:
    static Impl make(Algorithm algorithm, Eigen::Index dim, const Hyperparameters<double>& hp) {
        switch (algorithm) {
            case Algorithm::sgd: return SgdRegressor<double>(dim, hp.sgd);
            case Algorithm::pa: return PaRegressor<double>(dim, hp.pa);
            case Algorithm::rls: return RlsRegressor<double>(dim, hp.rls);
        }
        throw DomainError("unknown algorithm");
    }

    Impl impl_;
};

static_assert(OnlineModel<AnyRegressor>);
static_assert(OnlineModel<RlsRegressor<double>>);

}  // namespace cardest
