//! Deterministic 1-D minimization: uniform grid scan, then golden-section
//! refinement inside the cells around the best grid local minima.

/// Default tie tolerance. Roots refined to a 1e-10 bracket differ by ~1e-11
/// in residual, so anything tighter would not recognize them as equivalent.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
    /// Golden-section stops once the bracket is narrower than this.
    pub x_tolerance: f64,
    /// Number of grid local minima (best first) that get refined.
    pub candidates: usize,
    /// Objective values closer than this count as ties, resolved towards the
    /// smallest `|x|` and then the smaller signed `x`.
    pub tie_tolerance: f64,
}

impl Default for GridSearch {
    fn default() -> Self {
        Self {
            lower: -10.0,
            upper: 10.0,
            step: 1e-3,
            x_tolerance: 1e-10,
            candidates: usize::MAX,
            tie_tolerance: TIE_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

fn better(a: Minimum, b: Minimum, tie: f64) -> bool {
    if (a.value - b.value).abs() > tie {
        return a.value < b.value;
    }
    match a.x.abs().partial_cmp(&b.x.abs()) {
        Some(std::cmp::Ordering::Equal) | None => a.x < b.x,
        Some(ord) => ord == std::cmp::Ordering::Less,
    }
}

impl GridSearch {
    pub fn grid_len(&self) -> usize {
        ((self.upper - self.lower) / self.step).round() as usize + 1
    }

    fn grid_point(&self, i: usize, n: usize) -> f64 {
        if i + 1 == n {
            self.upper
        } else {
            self.lower + i as f64 * self.step
        }
    }

    pub fn minimize(&self, mut f: impl FnMut(f64) -> f64) -> Minimum {
        assert!(
            self.upper >= self.lower && self.step > 0.0,
            "invalid search interval"
        );
        let n = self.grid_len();
        let xs: Vec<f64> = (0..n).map(|i| self.grid_point(i, n)).collect();
        let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

        // Grid local minima (plateaus count once per point; boundaries included).
        let tie = self.tie_tolerance;
        let mut local: Vec<usize> = (0..n)
            .filter(|&i| {
                let left = i == 0 || values[i] <= values[i - 1];
                let right = i + 1 == n || values[i] <= values[i + 1];
                left && right
            })
            .collect();
        local.sort_by(|&a, &b| {
            let (ma, mb) = (
                Minimum {
                    x: xs[a],
                    value: values[a],
                },
                Minimum {
                    x: xs[b],
                    value: values[b],
                },
            );
            if better(ma, mb, tie) {
                std::cmp::Ordering::Less
            } else if better(mb, ma, tie) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });

        let mut best: Option<Minimum> = None;
        for &i in local.iter().take(self.candidates.max(1)) {
            let grid = Minimum {
                x: xs[i],
                value: values[i],
            };
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(n - 1)];
            let refined = golden_section(&mut f, lo, hi, self.x_tolerance);
            let candidate = if refined.value <= grid.value {
                refined
            } else {
                grid
            };
            if best.map_or(true, |b| better(candidate, b, tie)) {
                best = Some(candidate);
            }
        }
        best.expect("grid has at least one point")
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_section(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    x_tolerance: f64,
) -> Minimum {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tolerance {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        Minimum { x: c, value: fc }
    } else {
        Minimum { x: d, value: fd }
    }
}
