#pragma once

#include "tvfbe/problem.hpp"

namespace tvfbe {

// Step-size parameter of the envelope. The envelope is only a valid smooth
// surrogate for gamma strictly inside (0, 1/L), hence the checked factory.
struct EnvelopeParams {
    double gamma = 0.0;

    static EnvelopeParams checked(double gamma, double L) {
        if (!(L > 0.0)) throw std::invalid_argument("smoothness modulus L must be positive");
        if (!(gamma > 0.0) || !(gamma < 1.0 / L))
            throw std::invalid_argument("gamma must lie in (0, 1/L)");
        return EnvelopeParams{gamma};
    }
};

// Everything the envelope knows at one point, from one fused oracle pass
// (2 matvec units) plus, when the gradient is requested, one Hessian-vector
// product (2 more). Letting callers share this is what keeps the per-
// iteration oracle cost of the solvers at its nominal value.
struct EnvelopeEval {
    double phi_value = 0.0;   // phi(x)
    double value = 0.0;       // M(x)
    Vector grad_phi;          // grad phi(x)
    Vector fb_point;          // T(x) = prox_{gamma g}(x - gamma grad phi(x))
    Vector residual;          // R(x) = (x - T(x)) / gamma
    double residual_norm = 0.0;
    Vector gradient;          // grad M(x) = (I - gamma hess phi(x)) R(x); empty unless requested
};

// Evaluate M, T and R at x (2 units). with_gradient additionally forms
// grad M via one Hessian-vector product (2 more units).
EnvelopeEval evaluate_envelope(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                               const EnvelopeParams& params, bool with_gradient);

// Value of the forward-backward envelope
//   M(x) = phi(x) + <grad phi(x), T(x) - x> + g(T(x)) + ||T(x) - x||^2 / (2 gamma).
// M minorizes phi + g everywhere and touches it exactly at fixed points of T;
// both functions have the same minimizers.
double fbe_value(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                 const EnvelopeParams& params);

// T(x): one proximal-gradient step from x.
Vector forward_backward_step(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                             const EnvelopeParams& params);

// R(x) = (x - T(x)) / gamma; zero exactly at minimizers of phi + g.
Vector residual(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                const EnvelopeParams& params);

// grad M(x) = R(x) - gamma * hess phi(x) R(x).
Vector fbe_gradient(const SmoothFunction& phi, const NonsmoothTerm& g, const Vector& x,
                    const EnvelopeParams& params);

}  // namespace tvfbe
