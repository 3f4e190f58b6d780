//! Mean exit times from the linear solve against an independent random-walk
//! simulation, and the walk dimension of the gasket fitted from both.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mmd_extension::cli::run::central_vertex;
use mmd_extension::dirichlet::mean_exit_time;
use mmd_extension::hke::beta_fit;
use mmd_extension::linalg::least_squares;
use mmd_extension::mmspace::{CatalogSpec, Space, Vertex};

/// Sample mean and standard error of the exit time of the continuous-time walk
/// (jump to `y` at rate `w_xy / m(x)`) started at `x0` from `B(x0, r)`.
/// Holding times enter through their expectation `m(x) / c(x)`, which leaves
/// the mean unchanged and lowers the variance.
fn simulate(space: &Space, x0: Vertex, r: f64, walks: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let row = space.distance_row(x0).to_vec();
    let m = space.measure();
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..walks {
        let (mut x, mut t) = (x0, 0.0);
        while row[x] < r {
            let c = space.total_conductance(x);
            t += m[x] / c;
            let mut u = rng.random::<f64>() * c;
            let nb = space.neighbors(x);
            let mut next = nb[nb.len() - 1].0;
            for &(y, k) in nb {
                u -= space.edges()[k].conductance;
                if u < 0.0 {
                    next = y;
                    break;
                }
            }
            x = next;
        }
        sum += t;
        sq += t * t;
    }
    let mean = sum / walks as f64;
    let var = (sq / walks as f64 - mean * mean).max(0.0);
    (mean, (var / walks as f64).sqrt())
}

fn solved(space: &Space, x: Vertex, r: f64) -> f64 {
    mean_exit_time(space, &space.ball(x, r).unwrap().to_set(space.len())).unwrap()[x]
}

#[test]
fn path_walk_matches_solve() {
    let s = Space::from_catalog(&CatalogSpec::path(40)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for r in [3.0, 6.0, 10.0] {
        let exact = solved(&s, 20, r);
        // Unit conductances and measure: the walk leaves rate 2, so r² steps take r²/2.
        assert!((exact - r * r / 2.0).abs() < 1e-9, "r = {r}: {exact}");
        let (mc, se) = simulate(&s, 20, r, 4000, &mut rng);
        assert!((mc - exact).abs() < 4.0 * se, "r = {r}: walk {mc} ± {se}, solve {exact}");
    }
}

#[test]
fn gasket_walk_matches_solve() {
    let g = Space::from_catalog(&CatalogSpec::gasket(4)).unwrap();
    let x = central_vertex(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for r in [2.0, 4.0, 6.0] {
        let exact = solved(&g, x, r);
        let (mc, se) = simulate(&g, x, r, 4000, &mut rng);
        assert!((mc - exact).abs() < 4.0 * se, "r = {r}: walk {mc} ± {se}, solve {exact}");
    }
}

#[test]
fn gasket_beta_from_walks() {
    let g = Space::from_catalog(&CatalogSpec::gasket(6)).unwrap();
    let x = central_vertex(&g);
    let radii = [4.0, 6.0, 8.0, 12.0, 16.0];
    let fit = beta_fit(&g, &radii, &[x]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (lr, lt): (Vec<f64>, Vec<f64>) =
        radii.iter().map(|&r| (r.ln(), simulate(&g, x, r, 2000, &mut rng).0.ln())).unzip();
    let (mc_beta, _, _) = least_squares(&lr, &lt);
    assert!((mc_beta - fit.beta).abs() < 0.1, "walk slope {mc_beta}, solve slope {}", fit.beta);
    assert!((fit.beta - 2.32).abs() < 0.15, "fitted β = {}", fit.beta);
}
