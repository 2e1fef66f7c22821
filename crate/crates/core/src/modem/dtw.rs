use crate::error::{Error, Result};

/// Dynamic time warping distance with absolute-difference local cost.
///
/// Steps are `(i-1, j)`, `(i, j-1)` and `(i-1, j-1)`. A positive `window`
/// restricts the path to the Sakoe-Chiba band `|i - j| <= window`; `0`
/// leaves the path unconstrained.
pub fn dtw_distance(a: &[f64], b: &[f64], window: usize) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySequence);
    }
    let (n, m) = (a.len(), b.len());
    let w = if window == 0 { n.max(m) } else { window };
    if n.abs_diff(m) > w {
        return Err(Error::BandTooNarrowForDtw {
            window,
            len_a: n,
            len_b: m,
        });
    }

    // rolling rows over j, index 0 is the virtual column before b[0]
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for i in 1..=n {
        curr.fill(f64::INFINITY);
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(m);
        for j in lo..=hi {
            let best = prev[j - 1].min(prev[j]).min(curr[j - 1]);
            curr[j] = (a[i - 1] - b[j - 1]).abs() + best;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m])
}
