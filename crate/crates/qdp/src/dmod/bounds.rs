//! Evaluators for the epsilon/lambda bounds: homology of a complex, pages
//! of a spectral sequence, cohomology of finitely generated VI-modules, and
//! the unipotent Specht family.

use serde::Serialize;

use crate::qarith::QContext;

/// Bound on `epsilon` of the homology of a three-term complex:
/// `max(eps_1, eps_2, eps_3, fl(lambda_1), fl(lambda_2)) + 1`.
pub fn bound_homology_epsilon(
    eps1: usize,
    eps2: usize,
    eps3: usize,
    lam1: i64,
    lam2: i64,
    ctx: &QContext,
) -> usize {
    eps1.max(eps2)
        .max(eps3)
        .max(ctx.fl(lam1))
        .max(ctx.fl(lam2))
        + 1
}

/// Window data for the spectral-sequence bound: `epsilon` on the first page
/// and `fl(lambda)` on the first page, both indexed by total degree.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralWindow {
    /// eps_1^t keyed by total degree t (entries may be missing)
    pub eps1: Vec<(i64, usize)>,
    /// fl^t keyed by total degree t
    pub fl: Vec<(i64, usize)>,
}

impl SpectralWindow {
    fn eps_at(&self, t: i64) -> Option<usize> {
        self.eps1.iter().find(|(s, _)| *s == t).map(|(_, v)| *v)
    }
    fn fl_at(&self, t: i64) -> Option<usize> {
        self.fl.iter().find(|(s, _)| *s == t).map(|(_, v)| *v)
    }
}

/// The page-k bound
/// `eps^t_{1+k} <= max(eps_1^{t-k..t+k}, fl^{t-k..t+k-1}) + k`.
/// Degrees absent from the window are treated as absent terms.
pub fn bound_spectral_epsilon(window: &SpectralWindow, t: i64, k: usize) -> usize {
    let mut best = 0usize;
    for s in (t - k as i64)..=(t + k as i64) {
        if let Some(e) = window.eps_at(s) {
            best = best.max(e);
        }
    }
    for s in (t - k as i64)..(t + k as i64) {
        if let Some(fl) = window.fl_at(s) {
            best = best.max(fl);
        }
    }
    best + k
}

/// The convergence bound for a spectral sequence supported in columns
/// `-r..=r`: the page `2r + 2` is the last one with differentials, so
/// `eps(H^t) <= max over the symmetric window of width 2r+1, plus 2r+1`.
pub fn bound_spectral_convergence(window: &SpectralWindow, t: i64, r: usize) -> usize {
    bound_spectral_epsilon(window, t, 2 * r + 1)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VimodBound {
    pub lambda_bound: i64,
    pub epsilon_bound: usize,
    pub onset: i64,
    pub period: u64,
}

/// Periodicity bounds for `H^t` of a finitely generated VI-module that is
/// generated in degrees `<= t0`, related in degrees `<= t1`, with dimension
/// polynomial of degree `delta`. The branch depends on whether `q = 2`.
pub fn bound_vimod(t: usize, t0: usize, t1: usize, delta: usize, ctx: &QContext) -> VimodBound {
    let (lambda_bound, eps_arg) = if ctx.q_int() == 2 {
        ((2 * t + delta) as i64, (2 * t + 7 * delta) as i64)
    } else {
        ((t + delta) as i64, (t + 4 * delta) as i64)
    };
    let epsilon_bound = ctx.fl(eps_arg) + 2 * delta + 1;
    VimodBound {
        lambda_bound,
        epsilon_bound,
        onset: lambda_bound.max((t0 + t1) as i64),
        period: ctx.b_value(epsilon_bound),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct UnipotentBound {
    pub s: u32,
    pub period: u64,
    pub onset: u64,
}

/// Periodicity of `n -> dim H^t(G_n, M_{mu[n]})` for a partition of `d`:
/// `s` is the smallest integer with `w ell^s >= 2t + 7d` (q = 2) or
/// `>= t + 4d` (otherwise); the period is `w ell^{s + 2d + 1}` and the
/// range starts at `max(d + 2t, 4d + 3)`.
pub fn bound_unipotent(t: usize, d: usize, ctx: &QContext) -> UnipotentBound {
    let threshold = if ctx.q_int() == 2 {
        (2 * t + 7 * d) as u64
    } else {
        (t + 4 * d) as u64
    };
    let w = ctx.w() as u64;
    let ell = ctx.ell();
    let mut s = 0u32;
    while w * ell.pow(s) < threshold {
        s += 1;
    }
    UnipotentBound {
        s,
        period: w * ell.pow(s + 2 * d as u32 + 1),
        onset: ((d + 2 * t) as u64).max((4 * d + 3) as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(ell: u64, q: u64) -> QContext {
        QContext::new(ell, q).unwrap()
    }

    #[test]
    fn homology_bound_examples() {
        let c = ctx(3, 2);
        assert_eq!(bound_homology_epsilon(0, 0, 0, 0, 0, &c), 1);
        // fl(5) = 2 with b = 1,2,6
        assert_eq!(bound_homology_epsilon(0, 0, 0, 5, 1, &c), 3);
        assert_eq!(bound_homology_epsilon(2, 0, 1, 0, 0, &c), 3);
    }

    #[test]
    fn spectral_bound_examples() {
        let c = ctx(3, 2);
        let _ = c;
        // k = 0: the first-page value itself
        let w = SpectralWindow {
            eps1: vec![(0, 4)],
            fl: vec![(0, 9)],
        };
        assert_eq!(bound_spectral_epsilon(&w, 0, 0), 4);
        // k = 1 with window eps (0,2,0), fl (1,1)
        let w = SpectralWindow {
            eps1: vec![(0, 0), (1, 2), (2, 0)],
            fl: vec![(0, 1), (1, 1)],
        };
        assert_eq!(bound_spectral_epsilon(&w, 1, 1), 3);
        // convergence with r = 1: all eps zero, all fl = c gives c + 3
        let w = SpectralWindow {
            eps1: (0..8).map(|t| (t, 0)).collect(),
            fl: (0..8).map(|t| (t, 5)).collect(),
        };
        assert_eq!(bound_spectral_convergence(&w, 4, 1), 5 + 3);
    }

    #[test]
    fn vimod_bound_examples() {
        // formula at zero
        let c = ctx(3, 4); // q = 4 != 2
        let b = bound_vimod(0, 0, 0, 0, &c);
        assert_eq!(b.lambda_bound, 0);
        assert_eq!(b.epsilon_bound, 1);

        // q = 2, ell = 3: w = 2, b = (1,2,6,18); fl(9) = 3
        let c = ctx(3, 2);
        let b = bound_vimod(1, 0, 0, 1, &c);
        assert_eq!(b.lambda_bound, 3);
        assert_eq!(b.epsilon_bound, 6);

        // q = 3, ell = 2: b = (1,2,4,8); fl(6) = 3
        let c = ctx(2, 3);
        let b = bound_vimod(2, 0, 0, 1, &c);
        assert_eq!(b.lambda_bound, 3);
        assert_eq!(b.epsilon_bound, 6);
    }

    #[test]
    fn unipotent_bound_examples() {
        // worked example: d=1, t=0, q=2, ell=3 -> s=2, period 486, onset 7
        let c = ctx(3, 2);
        let b = bound_unipotent(0, 1, &c);
        assert_eq!(b.s, 2);
        assert_eq!(b.period, 486);
        assert_eq!(b.onset, 7);

        // d=1, t=0, q=3, ell=2 (w=1): s=2, period 2^5 = 32, onset 7
        let c = ctx(2, 3);
        let b = bound_unipotent(0, 1, &c);
        assert_eq!(b.s, 2);
        assert_eq!(b.period, 32);
        assert_eq!(b.onset, 7);

        // degenerate d = 0
        let c = ctx(3, 2);
        let b = bound_unipotent(2, 0, &c);
        // threshold 2t = 4: w ell^s = 2, 6 -> s = 1
        assert_eq!(b.s, 1);
        assert_eq!(b.period, 2 * 9);
        assert_eq!(b.onset, 4);
    }

    #[test]
    fn ten_tuple_hand_evaluations() {
        // frozen hand evaluations across both branches
        let c32 = ctx(3, 2); // w=2, b=(1,2,6,18,54,162,486)
        let c23 = ctx(2, 3); // w=1, b=(1,2,4,8,16,32)
        let c54 = ctx(5, 4); // w=2, b=(1,2,10,50)

        // unipotent: (t, d) -> (s, period, onset)
        assert_eq!(
            bound_unipotent(1, 1, &c32),
            UnipotentBound { s: 2, period: 486, onset: 7 }
        ); // 2t+7d = 9 <= 18
        assert_eq!(
            bound_unipotent(0, 2, &c32),
            UnipotentBound { s: 2, period: 2 * 3u64.pow(7), onset: 11 }
        ); // 14 <= 18
        assert_eq!(
            bound_unipotent(3, 1, &c23),
            UnipotentBound { s: 3, period: 2u64.pow(6), onset: 7 }
        ); // t+4d = 7 <= 8
        assert_eq!(
            bound_unipotent(0, 1, &c54),
            UnipotentBound { s: 1, period: 2 * 5u64.pow(4), onset: 7 }
        ); // t+4d = 4 <= 10

        // vimod: (t, t0, t1, delta)
        assert_eq!(
            bound_vimod(0, 1, 2, 0, &c32),
            VimodBound { lambda_bound: 0, epsilon_bound: 1, onset: 3, period: 2 }
        ); // fl(0)=0
        assert_eq!(
            bound_vimod(2, 0, 0, 2, &c32),
            VimodBound { lambda_bound: 6, epsilon_bound: 8, onset: 6, period: 2 * 3u64.pow(7) }
        ); // fl(2*2+7*2=18)=3, +5
        assert_eq!(
            bound_vimod(1, 1, 1, 1, &c23),
            VimodBound { lambda_bound: 2, epsilon_bound: 6, onset: 2, period: 64 }
        ); // fl(5)=3, +3; b_6 = 2^6
        assert_eq!(
            bound_vimod(0, 0, 0, 1, &c54),
            VimodBound { lambda_bound: 1, epsilon_bound: 5, onset: 1, period: 2 * 5u64.pow(4) }
        ); // fl(4)=2, +3
        assert_eq!(
            bound_vimod(3, 2, 2, 0, &c54),
            VimodBound { lambda_bound: 3, epsilon_bound: 3, onset: 4, period: 50 }
        ); // fl(3)=2, +1; b_3 = 2 * 5^2
        assert_eq!(
            bound_vimod(1, 0, 3, 2, &c32),
            VimodBound { lambda_bound: 4, epsilon_bound: 8, onset: 4, period: 2 * 3u64.pow(7) }
        ); // q=2: 2t+delta=4; fl(2+14=16)=3, +5
    }
}
