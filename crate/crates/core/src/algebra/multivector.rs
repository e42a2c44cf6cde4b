//! Dense multivectors over the real Clifford algebra of Minkowski space.
//!
//! A blade is indexed by a 4-bit mask: bit `i` set means the basis vector
//! `g_i` is a factor, factors written in increasing index order (mask
//! `0b0110` is `g1 g2`). The metric signature is (+,-,-,-). All quantities
//! are in natural units.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::LazyLock;

/// Diagonal metric: `g0^2 = +1`, `g1^2 = g2^2 = g3^2 = -1`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Number of basis blades.
pub const BLADE_COUNT: usize = 16;

/// Grade of a blade mask (number of vector factors).
#[inline]
pub fn blade_grade(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// Product of two basis blades: sign from counting the transpositions that
/// sort the concatenated factor lists, then metric signs for repeated
/// indices. Result mask is the symmetric difference.
fn blade_product(a: usize, b: usize) -> (f64, usize) {
    let mut idx = [0u8; 8];
    let mut n = 0;
    for i in 0..4 {
        if a & (1 << i) != 0 {
            idx[n] = i as u8;
            n += 1;
        }
    }
    for i in 0..4 {
        if b & (1 << i) != 0 {
            idx[n] = i as u8;
            n += 1;
        }
    }

    let mut sign = 1.0;
    let mut swapped = true;
    while swapped {
        swapped = false;
        for k in 1..n {
            if idx[k - 1] > idx[k] {
                idx.swap(k - 1, k);
                sign = -sign;
                swapped = true;
            }
        }
    }

    let mut k = 0;
    while k < n {
        if k + 1 < n && idx[k] == idx[k + 1] {
            sign *= METRIC[idx[k] as usize];
            k += 2;
        } else {
            k += 1;
        }
    }
    (sign, a ^ b)
}

/// Cached blade multiplication table.
static CAYLEY: LazyLock<[[(f64, usize); BLADE_COUNT]; BLADE_COUNT]> = LazyLock::new(|| {
    let mut table = [[(0.0, 0usize); BLADE_COUNT]; BLADE_COUNT];
    for (a, row) in table.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = blade_product(a, b);
        }
    }
    table
});

/// Dense element of the 16-dimensional spacetime algebra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multivector {
    pub coeffs: [f64; BLADE_COUNT],
}

impl Multivector {
    pub fn zero() -> Self {
        Multivector {
            coeffs: [0.0; BLADE_COUNT],
        }
    }

    pub fn scalar(s: f64) -> Self {
        let mut m = Self::zero();
        m.coeffs[0] = s;
        m
    }

    /// Single blade `c * g_mask`.
    pub fn blade(mask: usize, c: f64) -> Self {
        assert!(mask < BLADE_COUNT, "blade mask out of range: {mask}");
        let mut m = Self::zero();
        m.coeffs[mask] = c;
        m
    }

    /// Basis vector `g_mu`.
    pub fn basis_vector(mu: usize) -> Self {
        assert!(mu < 4, "basis vector index out of range: {mu}");
        Self::blade(1 << mu, 1.0)
    }

    /// Index-raised basis vector `g^mu = eta^{mu mu} g_mu`.
    pub fn basis_vector_upper(mu: usize) -> Self {
        assert!(mu < 4, "basis vector index out of range: {mu}");
        Self::blade(1 << mu, METRIC[mu])
    }

    /// Unit pseudoscalar `g0 g1 g2 g3`; squares to -1.
    pub fn pseudoscalar() -> Self {
        Self::blade(0b1111, 1.0)
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn pseudoscalar_part(&self) -> f64 {
        self.coeffs[0b1111]
    }

    /// Grade projection; keeps exactly the coefficients of grade `r`.
    pub fn grade(&self, r: usize) -> Multivector {
        assert!(r <= 4, "grade out of range: {r}");
        let mut out = Self::zero();
        for mask in 0..BLADE_COUNT {
            if blade_grade(mask) == r {
                out.coeffs[mask] = self.coeffs[mask];
            }
        }
        out
    }

    /// Reversion: blade sign (-1)^{r(r-1)/2}; fixes grades 0, 1, 4 and
    /// negates grades 2, 3.
    pub fn reverse(&self) -> Multivector {
        let mut out = *self;
        for mask in 0..BLADE_COUNT {
            let r = blade_grade(mask);
            if r == 2 || r == 3 {
                out.coeffs[mask] = -out.coeffs[mask];
            }
        }
        out
    }

    /// Exterior product: grade-(r+s) part of the geometric product,
    /// extended bilinearly over mixed-grade inputs.
    pub fn wedge(&self, rhs: &Multivector) -> Multivector {
        let mut out = Self::zero();
        for a in 0..BLADE_COUNT {
            let ca = self.coeffs[a];
            if ca == 0.0 {
                continue;
            }
            for b in 0..BLADE_COUNT {
                let cb = rhs.coeffs[b];
                if cb == 0.0 {
                    continue;
                }
                if a & b == 0 {
                    let (sign, mask) = CAYLEY[a][b];
                    out.coeffs[mask] += sign * ca * cb;
                }
            }
        }
        out
    }

    /// Inner product: grade-|r-s| part of the geometric product, grade
    /// pair by grade pair.
    pub fn dot(&self, rhs: &Multivector) -> Multivector {
        let mut out = Self::zero();
        for a in 0..BLADE_COUNT {
            let ca = self.coeffs[a];
            if ca == 0.0 {
                continue;
            }
            let ga = blade_grade(a) as isize;
            for b in 0..BLADE_COUNT {
                let cb = rhs.coeffs[b];
                if cb == 0.0 {
                    continue;
                }
                let gb = blade_grade(b) as isize;
                let (sign, mask) = CAYLEY[a][b];
                if blade_grade(mask) as isize == (ga - gb).abs() {
                    out.coeffs[mask] += sign * ca * cb;
                }
            }
        }
        out
    }

    /// Scalar part of the inner product; for two bivectors this is the
    /// full contraction.
    pub fn scalar_dot(&self, rhs: &Multivector) -> f64 {
        self.dot(rhs).scalar_part()
    }

    /// Euclidean norm of the coefficient vector; used for tolerances and
    /// residual magnitudes, not a Clifford norm.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Norm of the odd-grade coefficients.
    pub fn odd_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(mask, _)| blade_grade(*mask) % 2 == 1)
            .map(|(_, c)| c * c)
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Multivector {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c *= s;
        }
        out
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Multivector {
    fn add_assign(&mut self, rhs: Multivector) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += b;
        }
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        let mut out = self;
        out -= rhs;
        out
    }
}

impl SubAssign for Multivector {
    fn sub_assign(&mut self, rhs: Multivector) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a -= b;
        }
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scaled(-1.0)
    }
}

impl Mul for Multivector {
    type Output = Multivector;
    /// Geometric product.
    fn mul(self, rhs: Multivector) -> Multivector {
        let mut out = Multivector::zero();
        for a in 0..BLADE_COUNT {
            let ca = self.coeffs[a];
            if ca == 0.0 {
                continue;
            }
            for b in 0..BLADE_COUNT {
                let cb = rhs.coeffs[b];
                if cb == 0.0 {
                    continue;
                }
                let (sign, mask) = CAYLEY[a][b];
                out.coeffs[mask] += sign * ca * cb;
            }
        }
        out
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scaled(rhs)
    }
}

impl Mul<Multivector> for f64 {
    type Output = Multivector;
    fn mul(self, rhs: Multivector) -> Multivector {
        rhs.scaled(self)
    }
}

/// Blade name in the text form: `s` for the scalar, otherwise `g`
/// followed by the factor indices in increasing order.
pub fn blade_name(mask: usize) -> String {
    if mask == 0 {
        return "s".to_string();
    }
    let mut name = String::from("g");
    for i in 0..4 {
        if mask & (1 << i) != 0 {
            name.push(char::from_digit(i as u32, 10).unwrap());
        }
    }
    name
}

/// Display order: by grade, then by mask, so scalars print first.
fn display_order() -> [usize; BLADE_COUNT] {
    let mut order: Vec<usize> = (0..BLADE_COUNT).collect();
    order.sort_by_key(|&m| (blade_grade(m), m));
    let mut out = [0usize; BLADE_COUNT];
    out.copy_from_slice(&order);
    out
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for mask in display_order() {
            let c = self.coeffs[mask];
            if c == 0.0 {
                continue;
            }
            if first {
                write!(f, "{}*{}", c, blade_name(mask))?;
                first = false;
            } else if c < 0.0 {
                write!(f, " - {}*{}", -c, blade_name(mask))?;
            } else {
                write!(f, " + {}*{}", c, blade_name(mask))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Failure to parse the multivector text form.
#[derive(Debug, Clone, thiserror::Error)]
#[error("invalid multivector text: {0}")]
pub struct ParseMultivectorError(pub String);

fn parse_blade(name: &str) -> Result<usize, ParseMultivectorError> {
    if name == "s" {
        return Ok(0);
    }
    let digits = name
        .strip_prefix('g')
        .ok_or_else(|| ParseMultivectorError(format!("unknown blade name `{name}`")))?;
    if digits.is_empty() {
        return Err(ParseMultivectorError("empty blade index list".into()));
    }
    let mut mask = 0usize;
    let mut last: i32 = -1;
    for ch in digits.chars() {
        let i = ch
            .to_digit(10)
            .filter(|&d| d < 4)
            .ok_or_else(|| ParseMultivectorError(format!("bad blade index `{ch}`")))?
            as i32;
        if i <= last {
            return Err(ParseMultivectorError(format!(
                "blade indices must strictly increase in `{name}`"
            )));
        }
        last = i;
        mask |= 1 << i;
    }
    Ok(mask)
}

impl std::str::FromStr for Multivector {
    type Err = ParseMultivectorError;

    /// Parses the `c*g013` text form (terms joined by `+`/`-`). A bare
    /// number is a scalar term; a bare blade name has coefficient 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // Separate +/- operators, keeping exponent signs attached.
        let mut spaced = String::with_capacity(s.len() + 8);
        let mut prev: Option<char> = None;
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !matches!(prev, Some('e') | Some('E') | None) {
                spaced.push(' ');
                spaced.push(ch);
                spaced.push(' ');
            } else {
                spaced.push(ch);
            }
            if !ch.is_whitespace() {
                prev = Some(ch);
            }
        }

        let mut out = Multivector::zero();
        let mut sign = 1.0;
        let mut saw_term = false;
        for tok in spaced.split_whitespace() {
            match tok {
                "+" => continue,
                "-" => {
                    sign = -sign;
                    continue;
                }
                _ => {}
            }
            let (coeff, mask) = if let Some((num, blade)) = tok.split_once('*') {
                let c: f64 = num
                    .parse()
                    .map_err(|_| ParseMultivectorError(format!("bad coefficient `{num}`")))?;
                (c, parse_blade(blade)?)
            } else if let Ok(c) = tok.parse::<f64>() {
                (c, 0)
            } else {
                (1.0, parse_blade(tok)?)
            };
            out.coeffs[mask] += sign * coeff;
            sign = 1.0;
            saw_term = true;
        }
        if !saw_term {
            return Err(ParseMultivectorError("no terms".into()));
        }
        Ok(out)
    }
}
