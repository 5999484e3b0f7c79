//! Continuous design-space analysis, generic over the float type.
//!
//! These functions treat the talk/listen ratio γ = n/m and the beacon
//! fraction α as real parameters and expose the closed-form trade-off
//! curves of the Nihao design space:
//!
//! ```text
//! λ(γ) = 1/√γ + α·√γ          normalized energy–latency at ratio γ
//! A(γ) = 1 + α·γ              balance figure at ratio γ
//! ```
//!
//! The *balance residual* `A(γ) − γ·λ(γ)` factors as `(1 − u)(1 + α·u²)`
//! with `u = √γ`, so it has exactly one positive root, γ = 1, for every
//! α ≥ 0 — the balanced design is independent of beacon length. The root
//! finder locates it numerically by bisection as a cross-check of that
//! algebra.

use num_traits::Float;

/// Normalized energy–latency λ of a G-Nihao-style design at ratio γ = n/m.
pub fn lambda_of_gamma<F: Float>(gamma: F, alpha: F) -> F {
    gamma.sqrt().recip() + alpha * gamma.sqrt()
}

/// Balance figure A = Λ·η = 1 + α·γ at ratio γ.
pub fn balance_of_gamma<F: Float>(gamma: F, alpha: F) -> F {
    F::one() + alpha * gamma
}

/// Balance residual A(γ) − γ·λ(γ); positive below the balanced ratio,
/// negative above it, zero exactly at γ = 1.
pub fn balance_residual<F: Float>(gamma: F, alpha: F) -> F {
    balance_of_gamma(gamma, alpha) - gamma * lambda_of_gamma(gamma, alpha)
}

/// The positive root of the balance residual, found by bisection on the
/// bracket [1/4, 4] (the residual is strictly positive at 1/4 and strictly
/// negative at 4 for every α ≥ 0). Refines until the bracket is narrower
/// than `tol`.
pub fn balance_root<F: Float>(alpha: F, tol: F) -> F {
    let two = F::one() + F::one();
    let four = two * two;
    let mut lo = four.recip();
    let mut hi = four;
    debug_assert!(balance_residual(lo, alpha) > F::zero());
    debug_assert!(balance_residual(hi, alpha) < F::zero());
    while hi - lo > tol {
        let mid = (lo + hi) / two;
        if balance_residual(mid, alpha) > F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// Exact λ floor for any Listen-Listen design with worst-case latency `l`
/// slots: √(l − 3/4) + 1/2.
pub fn lloptimal_lambda_exact<F: Float>(l: F) -> F {
    let half = F::one() / (F::one() + F::one());
    (l - half - F::one() / ((F::one() + F::one()) * (F::one() + F::one()))).sqrt() + half
}

/// Large-latency approximation of the same floor: √l.
pub fn lloptimal_lambda_approx<F: Float>(l: F) -> F {
    l.sqrt()
}

/// λ of S-Nihao(n) at beacon fraction α: (1 + α·n)/√n.
pub fn snihao_lambda<F: Float>(n: F, alpha: F) -> F {
    (F::one() + alpha * n) / n.sqrt()
}

/// The talk period minimizing S-Nihao's λ: n = 1/α (yielding λ = 2√α).
pub fn snihao_opt_n<F: Float>(alpha: F) -> F {
    alpha.recip()
}

/// λ of G-Nihao(m, n) at beacon fraction α: (m + α·n)/√(m·n).
pub fn gnihao_lambda<F: Float>(m: F, n: F, alpha: F) -> F {
    (m + alpha * n) / (m * n).sqrt()
}
