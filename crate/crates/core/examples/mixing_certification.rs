//! Certify Metropolis and Laplacian mixing matrices on a few topologies,
//! then show the two negative controls failing.

use dminmax::graph::Graph;
use dminmax::mixing::{certify_mixing, laplacian_weights, metropolis_weights, CERT_TOL};

fn main() -> dminmax::Result<()> {
    let graphs = [
        ("path-6", Graph::path(6)),
        ("ring-7", Graph::ring(7)),
        ("star-5", Graph::star(5)),
        ("random-10", Graph::random_connected(10, 0.25, 42)),
    ];
    for (name, g) in &graphs {
        let lmax = g.laplacian().symmetric_eigenvalues().max();
        for (scheme, w) in [("metropolis", metropolis_weights(g)), ("laplacian", laplacian_weights(g, lmax))] {
            let report = certify_mixing(&w, g, CERT_TOL)?;
            println!(
                "{name:<10} {scheme:<11} {}  lambda_min = {:.4}",
                if report.all_passed() { "PASS" } else { "FAIL" },
                report.lambda_min()
            );
        }
    }

    let g = Graph::path(3);
    println!("\nidentity on path-3:");
    println!("{}", certify_mixing(&dminmax::linalg::Matrix::identity(3, 3), &g, CERT_TOL)?);
    println!("\nlaplacian alpha = lambda_max/2 on path-3:");
    let half = g.laplacian().symmetric_eigenvalues().max() / 2.0;
    println!("{}", certify_mixing(&laplacian_weights(&g, half), &g, CERT_TOL)?);
    Ok(())
}
