//! Tensor midpoint grids on `T_N = [0,N)^d × [0,1)^d`.
//!
//! The integrands here are smooth and periodic, where the offset trapezoid
//! (midpoint) rule converges spectrally. Cell boundaries fall on multiples of
//! the spacing, so box symbols with faces on the grid get second order.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub n: usize,
    pub d: usize,
    /// Points per time axis (over `[0, N)`).
    pub m_x: usize,
    /// Points per frequency axis (over `[0, 1)`).
    pub m_xi: usize,
}

impl TorusGrid {
    pub fn new(n: usize, d: usize, m_x: usize, m_xi: usize) -> Self {
        TorusGrid { n, d, m_x, m_xi }
    }

    /// `s` points per unit length on the time axes and `s·N` per frequency axis.
    pub fn oversampled(n: usize, d: usize, s: usize) -> Self {
        TorusGrid { n, d, m_x: s * n, m_xi: s * n }
    }

    pub fn doubled(&self) -> Self {
        TorusGrid { m_x: 2 * self.m_x, m_xi: 2 * self.m_xi, ..*self }
    }

    pub fn len(&self) -> usize {
        self.m_x.pow(self.d as u32) * self.m_xi.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Uniform weight; the weights sum to `N^d`.
    pub fn weight(&self) -> f64 {
        let hx = self.n as f64 / self.m_x as f64;
        let hxi = 1.0 / self.m_xi as f64;
        (hx * hxi).powi(self.d as i32)
    }

    /// Coordinates of point `p`; time axes vary slowest.
    pub fn point(&self, mut p: usize, x: &mut [f64], xi: &mut [f64]) {
        let hx = self.n as f64 / self.m_x as f64;
        let hxi = 1.0 / self.m_xi as f64;
        for axis in (0..self.d).rev() {
            xi[axis] = ((p % self.m_xi) as f64 + 0.5) * hxi;
            p /= self.m_xi;
        }
        for axis in (0..self.d).rev() {
            x[axis] = ((p % self.m_x) as f64 + 0.5) * hx;
            p /= self.m_x;
        }
    }
}

/// Midpoint grid on the unit cube `[0,1]^{dim}` with `m` points per axis.
pub fn unit_cube_points(dim: usize, m: usize) -> impl Iterator<Item = Vec<f64>> {
    let total = m.pow(dim as u32);
    (0..total).map(move |mut p| {
        let mut u = vec![0.0; dim];
        for axis in (0..dim).rev() {
            u[axis] = ((p % m) as f64 + 0.5) / m as f64;
            p /= m;
        }
        u
    })
}

/// Split `0..len` into fixed-size chunks, map each chunk and fold the results
/// in chunk order. Chunking does not depend on the thread count, so results
/// are bitwise reproducible.
pub fn chunked_map_reduce<T, M, R>(len: usize, chunk: usize, map: M, init: T, mut reduce: R) -> T
where
    T: Send,
    M: Fn(std::ops::Range<usize>) -> T + Sync + Send,
    R: FnMut(T, T) -> T,
{
    let chunk = chunk.max(1);
    let ranges: Vec<std::ops::Range<usize>> = (0..len).step_by(chunk).map(|s| s..(s + chunk).min(len)).collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<T> = {
        use rayon::prelude::*;
        ranges.into_par_iter().map(&map).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<T> = ranges.into_iter().map(&map).collect();
    parts.into_iter().fold(init, &mut reduce)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_volume() {
        let g = TorusGrid::oversampled(3, 2, 2);
        assert!((g.weight() * g.len() as f64 - 9.0).abs() < 1e-12);
        let mut x = vec![0.0; 2];
        let mut xi = vec![0.0; 2];
        g.point(g.len() - 1, &mut x, &mut xi);
        assert!(x.iter().all(|&v| v < 3.0) && xi.iter().all(|&v| v < 1.0));
    }

    #[test]
    fn spectral_accuracy_on_periodic_integrand() {
        // ∫_0^1 exp(cos 2πt) dt = I_0(1)
        let i0_1 = 1.266_065_877_752_008_4;
        let m = 16;
        let s: f64 =
            unit_cube_points(1, m).map(|u| (2.0 * std::f64::consts::PI * u[0]).cos().exp()).sum::<f64>() / m as f64;
        assert!((s - i0_1).abs() < 1e-14);
    }

    #[test]
    fn chunked_reduce_is_ordered() {
        let v =
            chunked_map_reduce(10, 3, |r| r.map(|i| i.to_string()).collect::<String>(), String::new(), |a, b| a + &b);
        assert_eq!(v, "0123456789");
    }
}
