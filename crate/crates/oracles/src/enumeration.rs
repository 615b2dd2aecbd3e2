//! Brute-force mode sums for anisotropic harmonic traps.

/// Energy above zero point in units of the reference frequency.
pub fn energy(rel: [f64; 3], n: [u32; 3]) -> f64 {
    rel.iter().zip(n).map(|(w, k)| w * k as f64).sum()
}

/// Every mode with `nx + ny + nz` even and energy at most `e_cut`, by
/// exhaustive triple loop, unsorted.
pub fn even_modes(rel: [f64; 3], e_cut: f64) -> Vec<[u32; 3]> {
    let bound = |w: f64| (e_cut / w).floor() as u32 + 1;
    let mut out = Vec::new();
    for nx in 0..=bound(rel[0]) {
        for ny in 0..=bound(rel[1]) {
            for nz in 0..=bound(rel[2]) {
                let n = [nx, ny, nz];
                if (nx + ny + nz) % 2 == 0 && energy(rel, n) <= e_cut * (1.0 + 1e-12) {
                    out.push(n);
                }
            }
        }
    }
    out
}

/// Kahan-Babuska compensated sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.c
    }
}

/// Partition sums over even and odd `nx + ny + nz` with weights
/// `exp(-sum_i beta_i n_i)`, by direct summation of every term above
/// `exp(-46)` per axis.
pub struct ParitySums {
    pub even: f64,
    pub odd: f64,
}

fn axis_len(beta: f64) -> usize {
    (46.0 / beta).ceil() as usize + 1
}

/// Inner sums over `nz`, split by the parity of `nz`.
fn z_parity_sums(beta: f64) -> [f64; 2] {
    let mut z = [Compensated::default(); 2];
    for nz in 0..=axis_len(beta) {
        z[nz % 2].add((-beta * nz as f64).exp());
    }
    [z[0].value(), z[1].value()]
}

pub fn parity_sums(axis_beta: [f64; 3]) -> ParitySums {
    let z = z_parity_sums(axis_beta[2]);
    let mut even = Compensated::default();
    let mut odd = Compensated::default();
    for nx in 0..=axis_len(axis_beta[0]) {
        let wx = (-axis_beta[0] * nx as f64).exp();
        for ny in 0..=axis_len(axis_beta[1]) {
            let wy = wx * (-axis_beta[1] * ny as f64).exp();
            let p = (nx + ny) % 2;
            even.add(wy * z[p]);
            odd.add(wy * z[1 - p]);
        }
    }
    ParitySums {
        even: even.value(),
        odd: odd.value(),
    }
}

/// Thermal weight, among exchange-even modes, of those with at least one
/// odd quantum number.
pub fn mixed_parity_fraction(axis_beta: [f64; 3]) -> f64 {
    let z = z_parity_sums(axis_beta[2]);
    let mut exchange_even = Compensated::default();
    let mut all_even = Compensated::default();
    for nx in 0..=axis_len(axis_beta[0]) {
        let wx = (-axis_beta[0] * nx as f64).exp();
        for ny in 0..=axis_len(axis_beta[1]) {
            let wy = wx * (-axis_beta[1] * ny as f64).exp();
            exchange_even.add(wy * z[(nx + ny) % 2]);
            if nx % 2 == 0 && ny % 2 == 0 {
                all_even.add(wy * z[0]);
            }
        }
    }
    1.0 - all_even.value() / exchange_even.value()
}
