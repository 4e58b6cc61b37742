//! Dense revised simplex for linear programs with few rows and many columns.
//!
//! Solves
//!
//! ```text
//! maximize   h·y
//! subject to A y = c,  y >= 0
//! ```
//!
//! where `A` has `m` rows (small, typically `k + 2`) and `N` columns. The
//! basis inverse is an explicit `m × m` matrix, so an iteration costs one
//! pricing pass over the columns, `O(N m)`. Phase one starts from an all
//! artificial basis.
//!
//! The row multipliers `π` with `Bᵀ π = h_B` at the optimum are returned as
//! well: for the minimax fitting problem they are the primal unknowns.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Problem data in column-major form.
#[derive(Clone, Debug)]
pub struct ColumnLp<T> {
    rows: usize,
    columns: Vec<T>,
    objective: Vec<T>,
    rhs: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    /// Optimal objective `h·y`.
    pub objective: T,
    /// Nonzero primal entries `(column, value)`.
    pub basic: Vec<(usize, T)>,
    /// Row multipliers `π`, solving `Bᵀ π = h_B`.
    pub multipliers: Vec<T>,
    pub iterations: usize,
}

impl<T: Real> ColumnLp<T> {
    pub fn new(rows: usize, rhs: Vec<T>) -> Self {
        assert_eq!(rhs.len(), rows, "rhs length must equal the row count");
        ColumnLp {
            rows,
            columns: Vec::new(),
            objective: Vec::new(),
            rhs,
        }
    }

    pub fn push_column(&mut self, column: &[T], objective: T) {
        assert_eq!(
            column.len(),
            self.rows,
            "column length must equal the row count"
        );
        self.columns.extend_from_slice(column);
        self.objective.push(objective);
    }

    pub fn num_columns(&self) -> usize {
        self.objective.len()
    }

    #[inline]
    fn column(&self, j: usize) -> &[T] {
        &self.columns[j * self.rows..(j + 1) * self.rows]
    }

    pub fn solve(&self) -> Result<LpSolution<T>> {
        Simplex::new(self).run()
    }
}

struct Simplex<'a, T> {
    lp: &'a ColumnLp<T>,
    m: usize,
    n: usize,
    /// Row sign flips so that the working rhs is nonnegative.
    flip: Vec<T>,
    /// `basis[i]` is a real column index `< n` or an artificial `n + row`.
    basis: Vec<usize>,
    binv: Vec<T>,
    beta: Vec<T>,
    in_basis: Vec<bool>,
    tol: T,
    iterations: usize,
}

enum Step {
    Optimal,
    Pivoted { degenerate: bool },
}

const REFACTOR_EVERY: usize = 64;

impl<'a, T: Real> Simplex<'a, T> {
    fn new(lp: &'a ColumnLp<T>) -> Self {
        let m = lp.rows;
        let n = lp.num_columns();
        let flip: Vec<T> = lp
            .rhs
            .iter()
            .map(|&b| if b < T::zero() { -T::one() } else { T::one() })
            .collect();
        let mut binv = vec![T::zero(); m * m];
        for i in 0..m {
            binv[i * m + i] = T::one();
        }
        let beta = lp.rhs.iter().zip(&flip).map(|(&b, &s)| b * s).collect();
        Simplex {
            lp,
            m,
            n,
            flip,
            basis: (n..n + m).collect(),
            binv,
            beta,
            in_basis: vec![false; n],
            tol: T::solver_eps(),
            iterations: 0,
        }
    }

    /// Column of the working (row-flipped) constraint matrix.
    fn working_column(&self, j: usize, out: &mut [T]) {
        if j < self.n {
            for ((o, &a), &s) in out.iter_mut().zip(self.lp.column(j)).zip(&self.flip) {
                *o = a * s;
            }
        } else {
            out.iter_mut().for_each(|o| *o = T::zero());
            out[j - self.n] = T::one();
        }
    }

    fn cost(&self, j: usize, phase_one: bool) -> T {
        match (phase_one, j < self.n) {
            (true, true) => T::zero(),
            (true, false) => -T::one(),
            (false, true) => self.lp.objective[j],
            (false, false) => T::zero(),
        }
    }

    /// `π` in working-row coordinates: `π_i = Σ_r c_B[r] binv[r][i]`.
    fn prices(&self, phase_one: bool) -> Vec<T> {
        let m = self.m;
        let mut pi = vec![T::zero(); m];
        for r in 0..m {
            let c = self.cost(self.basis[r], phase_one);
            if c != T::zero() {
                for i in 0..m {
                    pi[i] += c * self.binv[r * m + i];
                }
            }
        }
        pi
    }

    fn run(mut self) -> Result<LpSolution<T>> {
        let max_iter = 50 * (self.n + self.m) + 1000;

        self.optimize(true, max_iter)?;
        let infeasibility: T = self
            .basis
            .iter()
            .zip(&self.beta)
            .filter(|(&j, _)| j >= self.n)
            .fold(T::zero(), |acc, (_, &v)| acc + v);
        let scale = self
            .lp
            .rhs
            .iter()
            .fold(T::one(), |acc, &b| acc.max(b.abs()));
        if infeasibility > self.tol * scale {
            return Err(Error::Solver("infeasible constraint system".into()));
        }
        self.drive_out_artificials();

        self.optimize(false, max_iter)?;
        self.refactor()?;

        let pi_working = self.prices(false);
        let multipliers = pi_working
            .iter()
            .zip(&self.flip)
            .map(|(&p, &s)| p * s)
            .collect();
        let mut objective = T::zero();
        let mut basic = Vec::new();
        for (&j, &v) in self.basis.iter().zip(&self.beta) {
            if j < self.n {
                let v = v.max(T::zero());
                objective += self.lp.objective[j] * v;
                basic.push((j, v));
            }
        }
        basic.sort_by_key(|&(j, _)| j);
        Ok(LpSolution {
            objective,
            basic,
            multipliers,
            iterations: self.iterations,
        })
    }

    fn optimize(&mut self, phase_one: bool, max_iter: usize) -> Result<()> {
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= max_iter {
                return Err(Error::Solver(format!("iteration limit {max_iter} reached")));
            }
            // Bland's rule after a long degenerate streak rules out cycling.
            let bland = degenerate_run > 2 * self.m + 10;
            match self.step(phase_one, bland)? {
                Step::Optimal => return Ok(()),
                Step::Pivoted { degenerate } => {
                    degenerate_run = if degenerate { degenerate_run + 1 } else { 0 };
                }
            }
            if self.iterations % REFACTOR_EVERY == 0 {
                self.refactor()?;
            }
        }
    }

    fn step(&mut self, phase_one: bool, bland: bool) -> Result<Step> {
        let m = self.m;
        let pi = self.prices(phase_one);

        let mut col = vec![T::zero(); m];
        let mut entering: Option<(usize, T)> = None;
        for j in 0..self.n {
            if self.in_basis[j] {
                continue;
            }
            self.working_column(j, &mut col);
            let d = self.cost(j, phase_one)
                - col
                    .iter()
                    .zip(&pi)
                    .fold(T::zero(), |acc, (&a, &p)| acc + a * p);
            if d > self.tol {
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.map_or(true, |(_, best)| d > best) {
                    entering = Some((j, d));
                }
            }
        }
        let Some((q, _)) = entering else {
            return Ok(Step::Optimal);
        };

        self.working_column(q, &mut col);
        let w = self.ftran(&col);

        let mut leaving: Option<(usize, T)> = None;
        for r in 0..m {
            if w[r] > self.tol {
                let ratio = self.beta[r].max(T::zero()) / w[r];
                let better = match leaving {
                    None => true,
                    Some((lr, best)) => {
                        ratio < best || (ratio == best && self.leaving_preferred(r, lr, bland, &w))
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        let Some((r, ratio)) = leaving else {
            return Err(Error::Solver("objective is unbounded".into()));
        };
        self.pivot(r, q, &w);
        Ok(Step::Pivoted {
            degenerate: ratio <= self.tol,
        })
    }

    fn leaving_preferred(&self, r: usize, current: usize, bland: bool, w: &[T]) -> bool {
        let (a, b) = (self.basis[r], self.basis[current]);
        // Artificials leave first; then Bland's lowest index, or the largest
        // pivot element for stability.
        match (a >= self.n, b >= self.n) {
            (true, false) => true,
            (false, true) => false,
            _ if bland => a < b,
            _ => w[r] > w[current],
        }
    }

    fn ftran(&self, col: &[T]) -> Vec<T> {
        let m = self.m;
        (0..m)
            .map(|r| (0..m).fold(T::zero(), |acc, i| acc + self.binv[r * m + i] * col[i]))
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[T]) {
        let m = self.m;
        let piv = w[r];
        for i in 0..m {
            self.binv[r * m + i] /= piv;
        }
        self.beta[r] /= piv;
        for row in 0..m {
            if row != r && w[row] != T::zero() {
                let f = w[row];
                for i in 0..m {
                    let v = self.binv[r * m + i];
                    self.binv[row * m + i] -= f * v;
                }
                let b = self.beta[r];
                self.beta[row] -= f * b;
            }
        }
        let old = self.basis[r];
        if old < self.n {
            self.in_basis[old] = false;
        }
        self.basis[r] = q;
        if q < self.n {
            self.in_basis[q] = true;
        }
        self.iterations += 1;
    }

    /// Replaces zero-level artificials by real columns where possible. Rows
    /// where no real column has a nonzero entry are redundant; their
    /// artificial stays basic at zero and never re-enters pricing.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        let mut col = vec![T::zero(); m];
        for r in 0..m {
            if self.basis[r] < self.n {
                continue;
            }
            let mut best: Option<(usize, T, Vec<T>)> = None;
            for j in 0..self.n {
                if self.in_basis[j] {
                    continue;
                }
                self.working_column(j, &mut col);
                let w = self.ftran(&col);
                let mag = w[r].abs();
                if mag > self.tol.sqrt() * T::lit(1e-2)
                    && best.as_ref().map_or(true, |(_, b, _)| mag > *b)
                {
                    best = Some((j, mag, w));
                }
            }
            if let Some((j, _, w)) = best {
                self.pivot(r, j, &w);
            }
        }
    }

    /// Recomputes `B⁻¹` by Gauss-Jordan elimination with partial pivoting
    /// and `β = B⁻¹ c` from scratch.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut a = vec![T::zero(); m * m];
        let mut col = vec![T::zero(); m];
        for (r, &j) in self.basis.iter().enumerate() {
            self.working_column(j, &mut col);
            for i in 0..m {
                a[i * m + r] = col[i];
            }
        }
        let mut inv = vec![T::zero(); m * m];
        for i in 0..m {
            inv[i * m + i] = T::one();
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&x, &y| {
                    a[x * m + c]
                        .abs()
                        .partial_cmp(&a[y * m + c].abs())
                        .expect("finite basis")
                })
                .expect("nonempty range");
            if a[p * m + c].abs() <= T::epsilon() {
                return Err(Error::Solver("basis became singular".into()));
            }
            if p != c {
                for i in 0..m {
                    a.swap(p * m + i, c * m + i);
                    inv.swap(p * m + i, c * m + i);
                }
            }
            let d = a[c * m + c];
            for i in 0..m {
                a[c * m + i] /= d;
                inv[c * m + i] /= d;
            }
            for row in 0..m {
                if row != c {
                    let f = a[row * m + c];
                    if f != T::zero() {
                        for i in 0..m {
                            let (av, iv) = (a[c * m + i], inv[c * m + i]);
                            a[row * m + i] -= f * av;
                            inv[row * m + i] -= f * iv;
                        }
                    }
                }
            }
        }
        self.binv = inv;
        let rhs: Vec<T> = self
            .lp
            .rhs
            .iter()
            .zip(&self.flip)
            .map(|(&b, &s)| b * s)
            .collect();
        self.beta = self.ftran(&rhs);
        Ok(())
    }
}
