//! Adaptive Dormand-Prince 5(4) integration of `dc/dt = -i H c` for real
//! symmetric `H` stored row-major.

pub struct Solution {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub steps: usize,
}

fn rhs(h: &[f64], n: usize, re: &[f64], im: &[f64], dre: &mut [f64], dim: &mut [f64]) {
    // d(re)/dt = H im, d(im)/dt = -H re
    for i in 0..n {
        let row = &h[i * n..(i + 1) * n];
        let mut a = 0.0;
        let mut b = 0.0;
        for j in 0..n {
            a += row[j] * im[j];
            b += row[j] * re[j];
        }
        dre[i] = a;
        dim[i] = -b;
    }
}

/// Integrates from `t = 0` to `t_end` with mixed tolerance `tol`.
pub fn propagate(h: &[f64], n: usize, re0: &[f64], im0: &[f64], t_end: f64, tol: f64) -> Solution {
    assert_eq!(h.len(), n * n);
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut re = re0.to_vec();
    let mut im = im0.to_vec();
    let mut t = 0.0;
    let norm_h = h.iter().map(|x| x.abs()).fold(0.0, f64::max) * n as f64;
    let mut dt = (0.01 / norm_h.max(1e-300)).min(t_end.max(1e-300));
    let mut kr = vec![vec![0.0; n]; 7];
    let mut ki = vec![vec![0.0; n]; 7];
    let mut steps = 0;
    let mut sr = vec![0.0; n];
    let mut si = vec![0.0; n];
    while t < t_end {
        if t + dt > t_end {
            dt = t_end - t;
        }
        for s in 0..7 {
            for i in 0..n {
                let mut a = re[i];
                let mut b = im[i];
                for p in 0..s {
                    a += dt * A[s][p] * kr[p][i];
                    b += dt * A[s][p] * ki[p][i];
                }
                sr[i] = a;
                si[i] = b;
            }
            rhs(h, n, &sr, &si, &mut kr[s], &mut ki[s]);
        }
        let mut err = 0.0f64;
        let mut new_r = vec![0.0; n];
        let mut new_i = vec![0.0; n];
        for i in 0..n {
            let mut a5 = re[i];
            let mut b5 = im[i];
            let mut ea = 0.0;
            let mut eb = 0.0;
            for s in 0..7 {
                a5 += dt * B5[s] * kr[s][i];
                b5 += dt * B5[s] * ki[s][i];
                ea += dt * (B5[s] - B4[s]) * kr[s][i];
                eb += dt * (B5[s] - B4[s]) * ki[s][i];
            }
            let scale = tol * (1.0 + a5.abs().max(re[i].abs()));
            let scale_i = tol * (1.0 + b5.abs().max(im[i].abs()));
            err = err.max((ea / scale).abs()).max((eb / scale_i).abs());
            new_r[i] = a5;
            new_i[i] = b5;
        }
        if err <= 1.0 {
            t += dt;
            re = new_r;
            im = new_i;
            steps += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        dt *= factor;
    }
    Solution { re, im, steps }
}
