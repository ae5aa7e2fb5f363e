//! Embedded Dormand-Prince 5(4) step with dense output.

/// One adaptive step proposal: 5th-order solution, embedded error
/// estimate, and the dense-output coefficients of the accepted interval.
pub struct Dp5Step {
    pub y: [f64; 2],
    pub err_norm: f64,
    pub dense: DenseSegment,
    /// Derivative at the right endpoint (FSAL stage).
    pub k_end: [f64; 2],
}

/// Quartic interpolant over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; 2]; 5],
}

impl DenseSegment {
    /// State at `t0 + theta h`, `theta` in `[0, 1]`.
    pub fn eval(&self, theta: f64) -> [f64; 2] {
        let th1 = 1.0 - theta;
        let mut out = [0.0; 2];
        for d in 0..2 {
            let r = &self.rcont;
            out[d] = r[0][d] + theta * (r[1][d] + th1 * (r[2][d] + theta * (r[3][d] + th1 * r[4][d])));
        }
        out
    }

    pub fn t_at(&self, theta: f64) -> f64 {
        self.t0 + theta * self.h
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Takes one trial step of size `h` from `(t, y)` with derivative `k1`
/// already evaluated there (FSAL).
pub fn dp5_step<F: Fn(f64, [f64; 2]) -> [f64; 2]>(
    f: &F,
    t: f64,
    y: [f64; 2],
    k1: [f64; 2],
    h: f64,
    rtol: f64,
    atol: f64,
) -> Dp5Step {
    let mut k = [[0.0f64; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = y;
        for d in 0..2 {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s - 1][j] * kj[d];
            }
            ys[d] += h * acc;
        }
        k[s] = f(t + h * c_node(s), ys);
    }
    // 5th-order solution is the stage-7 state (b row equals A[5]).
    let mut y5 = y;
    for d in 0..2 {
        let mut acc = 0.0;
        for j in 0..6 {
            acc += A[5][j] * k[j][d];
        }
        y5[d] += h * acc;
    }

    let mut err_norm = 0.0f64;
    for d in 0..2 {
        let mut e = 0.0;
        for (j, kj) in k.iter().enumerate() {
            e += E[j] * kj[d];
        }
        e *= h;
        let sc = atol + rtol * y[d].abs().max(y5[d].abs());
        err_norm = err_norm.max((e / sc).abs());
    }

    let mut rcont = [[0.0; 2]; 5];
    for d in 0..2 {
        let ydiff = y5[d] - y[d];
        let bspl = h * k[0][d] - ydiff;
        rcont[0][d] = y[d];
        rcont[1][d] = ydiff;
        rcont[2][d] = bspl;
        rcont[3][d] = ydiff - h * k[6][d] - bspl;
        let mut acc = 0.0;
        for (j, kj) in k.iter().enumerate() {
            acc += D[j] * kj[d];
        }
        rcont[4][d] = h * acc;
    }

    Dp5Step { y: y5, err_norm, dense: DenseSegment { t0: t, h, rcont }, k_end: k[6] }
}

fn c_node(s: usize) -> f64 {
    [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0][s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dense_output_tracks_harmonic_oscillator() {
        let f = |_t: f64, y: [f64; 2]| [y[1], -y[0]];
        let mut t = 0.0;
        let mut y = [1.0, 0.0];
        let mut k1 = f(t, y);
        let h = 0.05;
        for _ in 0..40 {
            let step = dp5_step(&f, t, y, k1, h, 1e-12, 1e-14);
            // probe the interpolant mid-step
            let mid = step.dense.eval(0.5);
            let tm = t + 0.5 * h;
            assert_abs_diff_eq!(mid[0], tm.cos(), epsilon = 1e-9);
            assert_abs_diff_eq!(mid[1], -tm.sin(), epsilon = 1e-9);
            t += h;
            y = step.y;
            k1 = step.k_end;
        }
        assert_abs_diff_eq!(y[0], 2.0_f64.cos(), epsilon = 1e-10);
    }
}
