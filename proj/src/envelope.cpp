#include "tvfbe/envelope.hpp"

#include <cmath>

namespace tvfbe {

EnvelopeEval evaluate_envelope(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                               const EnvelopeParams& params, bool with_gradient) {
    if (!(params.gamma > 0.0)) throw std::invalid_argument("gamma must lie in (0, 1/L)");
    const double gamma = params.gamma;
    const std::size_t n = x.size();

    EnvelopeEval e;
    e.phi_value = phi.value_and_grad(x, e.grad_phi);

    Vector step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = x[i] - gamma * e.grad_phi[i];
    g.prox(step, gamma, e.fb_point);

    e.residual.resize(n);
    double inner = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = e.fb_point[i] - x[i];
        e.residual[i] = -d / gamma;
        inner += e.grad_phi[i] * d;
        sq += d * d;
    }
    e.residual_norm = std::sqrt(sq) / gamma;
    e.value = e.phi_value + inner + g.eval(e.fb_point) + sq / (2.0 * gamma);

    if (with_gradient) {
        Vector hr;
        phi.hess_vec(x, e.residual, hr);
        e.gradient.resize(n);
        for (std::size_t i = 0; i < n; ++i) e.gradient[i] = e.residual[i] - gamma * hr[i];
    }
    return e;
}

double fbe_value(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                 const EnvelopeParams& params) {
    return evaluate_envelope(phi, g, x, params, false).value;
}

Vector forward_backward_step(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                             const EnvelopeParams& params) {
    return evaluate_envelope(phi, g, x, params, false).fb_point;
}

Vector residual(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                const EnvelopeParams& params) {
    return evaluate_envelope(phi, g, x, params, false).residual;
}

Vector fbe_gradient(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                    const EnvelopeParams& params) {
    return evaluate_envelope(phi, g, x, params, true).gradient;
}

}  // namespace tvfbe
