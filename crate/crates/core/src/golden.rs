//! Golden-section search for the maximum of a unimodal function.

/// 1/φ
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Shrinks `[lo, hi]` by the golden ratio until it is narrower than `x_tol`,
/// returning the best point evaluated. `f` must be unimodal on the interval
/// for the result to be the true maximum.
pub fn maximize<E, F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<Maximum, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };

    while (b - a).abs() > x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if fd > best.1 {
                best = (d, fd);
            }
        }
        evaluations += 1;
    }
    Ok(Maximum {
        x: best.0,
        value: best.1,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn recovers_parabola_peak() {
        let peak = 1.528_6;
        let m =
            maximize::<Infallible, _>(|x| Ok(80.0 - 3e4 * (x - peak).powi(2)), 1.50, 1.56, 1e-7)
                .unwrap();
        assert!((m.x - peak).abs() < 1e-5);
        assert!((m.value - 80.0).abs() < 1e-6);
    }

    #[test]
    fn reversed_bounds_and_errors() {
        let m = maximize::<Infallible, _>(|x| Ok(-(x - 0.3).abs()), 1.0, 0.0, 1e-9).unwrap();
        assert!((m.x - 0.3).abs() < 1e-8);

        let r = maximize(
            |x| if x > 0.5 { Err("boom") } else { Ok(x) },
            0.0,
            1.0,
            1e-6,
        );
        assert_eq!(r.unwrap_err(), "boom");
    }
}
