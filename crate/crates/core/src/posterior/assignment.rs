//! Point-to-interval assignments: counting (permanent of the containment
//! matrix), enumeration and uniform sampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::marks::Mark;

/// Largest assignment problem accepted by the exponential-time routines.
pub const MAX_ASSIGNMENT_SIZE: usize = 20;

/// Largest problem for which all bijections are listed explicitly.
pub const MAX_ENUMERATION_SIZE: usize = 10;

fn check_sizes(points: &[f64], intervals: &[Mark], limit: usize) -> Result<usize> {
    if points.len() != intervals.len() {
        return Err(Error::InvalidParameter(format!(
            "{} points for {} intervals",
            points.len(),
            intervals.len()
        )));
    }
    let k = points.len();
    if k > limit {
        return Err(Error::TooLarge { k, limit });
    }
    Ok(k)
}

/// `rows[i]` has bit `j` set when point `j` lies in closed interval `i`.
fn containment_rows(points: &[f64], intervals: &[Mark]) -> Vec<u32> {
    intervals
        .iter()
        .map(|iv| {
            points.iter().enumerate().fold(0u32, |acc, (j, &x)| {
                if iv.a <= x && x <= iv.a + iv.l {
                    acc | (1 << j)
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// Ryser's formula with Gray-code column subsets.
fn permanent(rows: &[u32], k: usize) -> u64 {
    if k == 0 {
        return 1;
    }
    let mut row_sums = vec![0i64; k];
    let mut total: i128 = 0;
    let mut gray: u32 = 0;
    for step in 1u32..(1u32 << k) {
        let bit = step.trailing_zeros();
        let col = 1u32 << bit;
        let added = gray & col == 0;
        gray ^= col;
        for (s, &r) in row_sums.iter_mut().zip(rows) {
            if r & col != 0 {
                *s += if added { 1 } else { -1 };
            }
        }
        let prod: i128 = row_sums.iter().map(|&s| s as i128).product();
        if prod != 0 {
            if gray.count_ones() % 2 == 1 {
                total -= prod;
            } else {
                total += prod;
            }
        }
    }
    if k % 2 == 1 {
        total = -total;
    }
    total as u64
}

/// Number of bijections sending every point into its assigned interval.
pub fn count_valid_assignments(points: &[f64], intervals: &[Mark]) -> Result<u64> {
    let k = check_sizes(points, intervals, MAX_ASSIGNMENT_SIZE)?;
    Ok(permanent(&containment_rows(points, intervals), k))
}

/// A valid bijection: `assignment[i]` is the index of the point placed in
/// interval `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAssignment {
    pub assignment: Vec<usize>,
    pub probability: f64,
}

/// All valid bijections with their conditional probabilities (uniform).
pub fn assignment_distribution(points: &[f64], intervals: &[Mark]) -> Result<Vec<WeightedAssignment>> {
    let k = check_sizes(points, intervals, MAX_ENUMERATION_SIZE)?;
    let rows = containment_rows(points, intervals);
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    enumerate(&rows, 0, 0, &mut current, &mut out);
    if out.is_empty() {
        return Err(Error::Inconsistent(
            "no assignment of points to intervals is consistent with the data".into(),
        ));
    }
    let p = 1.0 / out.len() as f64;
    Ok(out
        .into_iter()
        .map(|assignment| WeightedAssignment {
            assignment,
            probability: p,
        })
        .collect())
}

fn enumerate(rows: &[u32], row: usize, used: u32, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if row == rows.len() {
        out.push(current.clone());
        return;
    }
    let mut free = rows[row] & !used;
    while free != 0 {
        let j = free.trailing_zeros() as usize;
        free &= free - 1;
        current.push(j);
        enumerate(rows, row + 1, used | (1 << j), current, out);
        current.pop();
    }
}

/// Draws a bijection uniformly among the valid ones, interval by interval,
/// weighting each choice by the permanent of the remaining minor.
pub fn sample_assignment<R: Rng + ?Sized>(points: &[f64], intervals: &[Mark], rng: &mut R) -> Result<Vec<usize>> {
    let k = check_sizes(points, intervals, MAX_ASSIGNMENT_SIZE)?;
    let rows = containment_rows(points, intervals);
    let mut remaining_cols: Vec<usize> = (0..k).collect();
    let mut out = Vec::with_capacity(k);
    for row in 0..k {
        let minor_rows = &rows[row + 1..];
        let mut weights = Vec::new();
        for (pos, &col) in remaining_cols.iter().enumerate() {
            if rows[row] & (1 << col) == 0 {
                weights.push((pos, 0u64));
                continue;
            }
            let cols: Vec<usize> = remaining_cols.iter().copied().filter(|&c| c != col).collect();
            let sub: Vec<u32> = minor_rows
                .iter()
                .map(|&r| {
                    cols.iter()
                        .enumerate()
                        .fold(0u32, |acc, (b, &c)| if r & (1 << c) != 0 { acc | (1 << b) } else { acc })
                })
                .collect();
            weights.push((pos, permanent(&sub, cols.len())));
        }
        let total: u64 = weights.iter().map(|w| w.1).sum();
        if total == 0 {
            return Err(Error::Inconsistent(
                "no assignment of points to intervals is consistent with the data".into(),
            ));
        }
        let mut pick = rng.random_range(0..total);
        let (pos, _) = *weights
            .iter()
            .find(|&&(_, w)| {
                if pick < w {
                    true
                } else {
                    pick -= w;
                    false
                }
            })
            .expect("pick below total weight");
        out.push(remaining_cols.remove(pos));
    }
    Ok(out)
}
