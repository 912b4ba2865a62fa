//! Thin wrappers over `libm` so the crate stays `no_std`.

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Max-norm of `a - b` relative to the max-norm of `a`; zero when both vanish.
pub fn rel_change(new: &[f64], old: &[f64]) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (&a, &b) in new.iter().zip(old) {
        diff = diff.max(abs(a - b));
        scale = scale.max(abs(a));
    }
    if diff == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        diff / scale
    }
}

/// Composite trapezoid rule on a uniform step.
pub fn trapezoid(h: f64, values: impl IntoIterator<Item = f64>) -> f64 {
    let mut it = values.into_iter();
    let Some(first) = it.next() else {
        return 0.0;
    };
    let mut sum = 0.5 * first;
    let mut last = first;
    let mut count = 1usize;
    for v in it {
        sum += v;
        last = v;
        count += 1;
    }
    if count == 1 {
        return 0.0;
    }
    h * (sum - 0.5 * last)
}
