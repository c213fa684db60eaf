use crate::dispersion::Scheme;

use super::field::{Boundary, FieldArray, Stagger};

/// Four-point stencil weights for the near and far neighbours.
const NEAR: f64 = 27.0 / 24.0;
const FAR: f64 = 1.0 / 24.0;

/// Source index after resolving ghosts, with the image sign.
#[inline]
fn resolve(idx: isize, len: usize, stagger: Stagger, boundary: Boundary) -> (usize, f64) {
    let n = len as isize;
    if (0..n).contains(&idx) {
        return (idx as usize, 1.0);
    }
    match (boundary, stagger) {
        (Boundary::Periodic, _) => (idx.rem_euclid(n) as usize, 1.0),
        // Node samples include both walls; tangential fields are odd images.
        (Boundary::Pec, Stagger::Node) => {
            let cells = n - 1;
            let m = if idx < 0 { -idx } else { 2 * cells - idx };
            (m as usize, -1.0)
        }
        // Half samples are mirrored evenly about the wall.
        (Boundary::Pec, Stagger::Half) => {
            let m = if idx < 0 { -1 - idx } else { 2 * n - 1 - idx };
            (m as usize, 1.0)
        }
    }
}

/// `out += coef · ∂src/∂ξ` along `axis`, evaluated at the positions of `out`.
///
/// `coef` must already include `1/Δξ`.  The two arrays share their
/// staggering on the other axes and are opposite along `axis`.  On PEC
/// walls, output samples that sit on the wall are left untouched.
pub(crate) fn add_derivative(
    out: &mut FieldArray,
    src: &FieldArray,
    axis: usize,
    coef: f64,
    scheme: Scheme,
    boundary: Boundary,
) {
    let src_stagger = src.component.stagger()[axis];
    let n_src = src.shape[axis];
    let n_out = out.shape[axis];
    let inner: usize = src.shape[..axis].iter().product();
    let outer: usize = src.shape[axis + 1..].iter().product();
    debug_assert_eq!(inner, out.shape[..axis].iter().product::<usize>());
    debug_assert_eq!(outer, out.shape[axis + 1..].iter().product::<usize>());

    // Tap offsets relative to the output index, and their weights.
    let taps: &[(isize, f64)] = match (scheme, src_stagger) {
        (Scheme::Fdtd22, Stagger::Node) => &[(1, 1.0), (0, -1.0)],
        (Scheme::Fdtd22, Stagger::Half) => &[(0, 1.0), (-1, -1.0)],
        (Scheme::Fdtd24, Stagger::Node) => &[(1, NEAR), (0, -NEAR), (2, -FAR), (-1, FAR)],
        (Scheme::Fdtd24, Stagger::Half) => &[(0, NEAR), (-1, -NEAR), (1, -FAR), (-2, FAR)],
    };
    let range = match (boundary, src_stagger) {
        (Boundary::Pec, Stagger::Half) => 1..n_out - 1,
        _ => 0..n_out,
    };

    // Output points whose taps all land inside the source array.
    let lo = taps.iter().map(|t| t.0).min().unwrap_or(0);
    let hi = taps.iter().map(|t| t.0).max().unwrap_or(0);
    let start = (range.start as isize).max(-lo);
    let end = (n_src as isize - hi).min(range.end as isize).max(start);
    let clear = start as usize..end as usize;

    let mut rows = [(0usize, 0.0f64); 4];
    for o in 0..outer {
        let src_base = o * n_src * inner;
        let out_base = o * n_out * inner;
        if inner == 1 && !clear.is_empty() {
            let s = &src.data[src_base..src_base + n_src];
            let d = &mut out.data[out_base + clear.start..out_base + clear.end];
            let tap = |off: isize| {
                let a = (clear.start as isize + off) as usize;
                &s[a..a + d.len()]
            };
            match *taps {
                [(a, wa), (b, wb)] => {
                    let (sa, sb) = (tap(a), tap(b));
                    let (wa, wb) = (coef * wa, coef * wb);
                    for (i, v) in d.iter_mut().enumerate() {
                        *v += wa * sa[i] + wb * sb[i];
                    }
                }
                [(a, wa), (b, wb), (c, wc), (e, we)] => {
                    let (sa, sb, sc, se) = (tap(a), tap(b), tap(c), tap(e));
                    let (wa, wb, wc, we) = (coef * wa, coef * wb, coef * wc, coef * we);
                    for (i, v) in d.iter_mut().enumerate() {
                        *v += wa * sa[i] + wb * sb[i] + wc * sc[i] + we * se[i];
                    }
                }
                _ => unreachable!("stencils have two or four taps"),
            }
        }
        for p in range.clone() {
            if inner == 1 && clear.contains(&p) {
                continue;
            }
            for (slot, &(off, w)) in rows.iter_mut().zip(taps) {
                let (q, sign) = resolve(p as isize + off, n_src, src_stagger, boundary);
                *slot = (src_base + q * inner, coef * w * sign);
            }
            let dst = &mut out.data[out_base + p * inner..out_base + (p + 1) * inner];
            let s = &src.data;
            match taps.len() {
                2 => {
                    let [(a, wa), (b, wb), ..] = rows;
                    for (i, d) in dst.iter_mut().enumerate() {
                        *d += wa * s[a + i] + wb * s[b + i];
                    }
                }
                _ => {
                    let [(a, wa), (b, wb), (c, wc), (e, we)] = rows;
                    for (i, d) in dst.iter_mut().enumerate() {
                        *d += wa * s[a + i] + wb * s[b + i] + wc * s[c + i] + we * s[e + i];
                    }
                }
            }
        }
    }
}
