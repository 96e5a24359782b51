use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ritz values in Leja order, closed under conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzSet {
    values: Vec<Complex64>,
    order: Vec<usize>,
    mean: Complex64,
}

impl RitzSet {
    /// Greedy Leja ordering: start from the largest modulus, then repeatedly
    /// take the value maximizing the product of distances to those already
    /// chosen. A complex value is followed immediately by its conjugate. Ties go
    /// to the larger real part, then the larger imaginary part.
    pub fn leja_order(values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::param("ritz", "no Ritz values"));
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("Ritz values"));
        }
        let partner = conjugate_partners(values)?;

        let mut taken = vec![false; n];
        // Sum of log distances to the chosen values; -inf once a duplicate is chosen.
        let mut score = vec![0.0f64; n];
        let mut order = Vec::with_capacity(n);

        let pick = |key: &dyn Fn(usize) -> f64, taken: &[bool]| -> usize {
            let mut best: Option<usize> = None;
            // A pair is represented by its upper member so that rounding in the
            // scores cannot put the lower one first.
            for c in (0..n).filter(|&c| !taken[c] && !(values[c].im < 0.0 && partner[c].is_some()))
            {
                best = Some(match best {
                    None => c,
                    Some(b) => {
                        let (kb, kc) = (key(b), key(c));
                        let (zb, zc) = (values[b], values[c]);
                        if kc > kb
                            || (kc == kb && (zc.re > zb.re || (zc.re == zb.re && zc.im > zb.im)))
                        {
                            c
                        } else {
                            b
                        }
                    }
                });
            }
            best.expect("a remaining candidate")
        };

        let select = |c: usize, taken: &mut [bool], score: &mut [f64], order: &mut Vec<usize>| {
            taken[c] = true;
            order.push(c);
            for k in (0..n).filter(|&k| !taken[k]) {
                score[k] += (values[k] - values[c]).norm().ln();
            }
        };

        let first = pick(&|c| values[c].norm(), &taken);
        select(first, &mut taken, &mut score, &mut order);
        if let Some(pp) = partner[first] {
            select(pp, &mut taken, &mut score, &mut order);
        }
        while order.len() < n {
            let snapshot = score.clone();
            let c = pick(&|c| snapshot[c], &taken);
            select(c, &mut taken, &mut score, &mut order);
            if let Some(pp) = partner[c] {
                select(pp, &mut taken, &mut score, &mut order);
            }
        }

        let ordered: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
        let sum = ordered
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z);
        Ok(Self {
            mean: sum / n as f64,
            values: ordered,
            order,
        })
    }

    /// Values in Leja order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `order[k]` is the input index of the `k`-th ordered value.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    /// Real part of the mean; the imaginary part is roundoff for real operators.
    pub fn mean_real(&self) -> f64 {
        self.mean.re
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Shifts for `s` steps, repeating the Leja sequence when there are fewer
    /// than `s` values. The mean is kept from the original set.
    pub fn cycled(&self, s: usize) -> Self {
        if s <= self.len() {
            return self.clone();
        }
        let idx: Vec<usize> = (0..s).map(|k| k % self.len()).collect();
        Self {
            values: idx.iter().map(|&k| self.values[k]).collect(),
            order: idx.iter().map(|&k| self.order[k]).collect(),
            mean: self.mean,
        }
    }

    /// Same values and mean translated by `c` (no reordering).
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|z| z + c).collect(),
            order: self.order.clone(),
            mean: self.mean + c,
        }
    }

    /// Same values and mean scaled by `alpha` (no reordering).
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            values: self.values.iter().map(|z| z * alpha).collect(),
            order: self.order.clone(),
            mean: self.mean * alpha,
        }
    }
}

/// For each complex value, the index of its conjugate. Repeated pairs are
/// matched in input order.
fn conjugate_partners(values: &[Complex64]) -> Result<Vec<Option<usize>>> {
    let n = values.len();
    let mut partner = vec![None; n];
    for i in 0..n {
        if values[i].im <= 0.0 || partner[i].is_some() {
            continue;
        }
        let conj = values[i].conj();
        let j = (0..n)
            .find(|&j| partner[j].is_none() && values[j] == conj)
            .ok_or_else(|| Error::param("ritz", format!("{} has no conjugate", values[i])))?;
        partner[i] = Some(j);
        partner[j] = Some(i);
    }
    if let Some(i) = (0..n).find(|&i| values[i].im < 0.0 && partner[i].is_none()) {
        return Err(Error::param(
            "ritz",
            format!("{} has no conjugate", values[i]),
        ));
    }
    Ok(partner)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn three_reals() {
        let r = RitzSet::leja_order(&re(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(r.values(), &re(&[3.0, 1.0, 2.0])[..]);
        assert_eq!(r.order(), &[2, 0, 1]);
        assert_eq!(r.mean(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn singleton() {
        let r = RitzSet::leja_order(&re(&[5.0])).unwrap();
        assert_eq!(r.values(), &re(&[5.0])[..]);
    }

    #[test]
    fn pair_is_adjacent() {
        let v = [
            Complex64::new(1.0, -1.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 1.0),
        ];
        let r = RitzSet::leja_order(&v).unwrap();
        assert_eq!(r.values(), &[v[1], v[2], v[0]]);
    }

    #[test]
    fn open_pair_is_rejected() {
        assert!(RitzSet::leja_order(&[Complex64::new(1.0, 1.0)]).is_err());
        assert!(RitzSet::leja_order(&[]).is_err());
    }

    #[test]
    fn duplicates_are_ordered_last() {
        let r = RitzSet::leja_order(&re(&[2.0, 2.0, 1.0])).unwrap();
        assert_eq!(r.values(), &re(&[2.0, 1.0, 2.0])[..]);
    }

    #[test]
    fn cycling_repeats_sequence() {
        let r = RitzSet::leja_order(&re(&[1.0, 2.0])).unwrap().cycled(5);
        assert_eq!(r.values(), &re(&[2.0, 1.0, 2.0, 1.0, 2.0])[..]);
        assert_eq!(r.mean(), Complex64::new(1.5, 0.0));
    }
}
